import * as fs from 'fs'
import * as path from 'path'

import { AttackRecord } from './fgsm'
import { N_CLASSES } from './data'

/** Shortest round-trip decimal; Python's float() parses all JS renderings. */
function fmt(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite value in export: ${v}`)
  return String(v)
}

export function writeDatasetCsv(
  filePath: string,
  ids: number[],
  labels: number[],
  features: number[][],
): void {
  const nDims = features[0].length
  const lines: string[] = [`# n_classes=${N_CLASSES}`]
  const header = ['id', 'label']
  for (let d = 0; d < nDims; d++) header.push(`f${d}`)
  lines.push(header.join(','))
  for (let i = 0; i < ids.length; i++) {
    lines.push([ids[i], labels[i], ...features[i].map(fmt)].join(','))
  }
  fs.writeFileSync(filePath, lines.join('\n') + '\n', 'utf-8')
}

/**
 * Binary dataset: "ADVG", version u8, then LE u32 n_points / n_dims /
 * n_classes, then per point u64 id, u32 label, n_dims f64 features.
 */
export function writeDatasetBinary(
  filePath: string,
  ids: number[],
  labels: number[],
  features: number[][],
): void {
  const m = ids.length
  const nDims = features[0].length
  const recSize = 8 + 4 + 8 * nDims
  const buf = Buffer.alloc(4 + 1 + 12 + m * recSize)
  buf.write('ADVG', 0, 'ascii')
  buf.writeUInt8(1, 4)
  buf.writeUInt32LE(m, 5)
  buf.writeUInt32LE(nDims, 9)
  buf.writeUInt32LE(N_CLASSES, 13)
  let off = 17
  for (let i = 0; i < m; i++) {
    buf.writeBigUInt64LE(BigInt(ids[i]), off)
    off += 8
    buf.writeUInt32LE(labels[i], off)
    off += 4
    for (let d = 0; d < nDims; d++) {
      buf.writeDoubleLE(features[i][d], off)
      off += 8
    }
  }
  fs.writeFileSync(filePath, buf)
}

export function writeAttackLogCsv(filePath: string, records: AttackRecord[]): void {
  const lines: string[] = [`# n_classes=${N_CLASSES}`]
  lines.push('id,epsilon,actual,adversarial')
  for (const r of records) {
    lines.push(`${r.id},${fmt(r.epsilon)},${r.actual},${r.adversarial}`)
  }
  fs.writeFileSync(filePath, lines.join('\n') + '\n', 'utf-8')
}

export function ensureDir(dir: string): void {
  fs.mkdirSync(dir, { recursive: true })
}

/** Remove partially written outputs after a failure. */
export function removeOutputs(dir: string, names: string[]): void {
  for (const name of names) {
    const p = path.join(dir, name)
    if (fs.existsSync(p)) fs.unlinkSync(p)
  }
}
