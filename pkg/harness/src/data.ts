import { DatasetName } from './config'

export interface RawDataset {
  /** row-major [m][784] pixel values in [0, 1] */
  inputs: number[][]
  /** ground-truth digit per row */
  labels: number[]
  name: DatasetName
}

export const IMAGE_DIM = 784
export const N_CLASSES = 10

/** Deterministic 32-bit PRNG (mulberry32). */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) >>> 0
    let t = a
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

/**
 * Load MNIST digits from the bundled `mnist` package, capped and balanced
 * across classes, deterministic for a fixed seed.  The package groups
 * digits by class, so we index into each group directly instead of using
 * its Math.random-based sampler.
 */
export function loadMnist(cap: number, seed: number): RawDataset {
  // eslint-disable-next-line @typescript-eslint/no-var-requires
  const mnist = require('mnist')
  const perClass = Math.floor(cap / N_CLASSES)
  const rng = makeRng(seed)
  const inputs: number[][] = []
  const labels: number[] = []
  for (let digit = 0; digit < N_CLASSES; digit++) {
    const group = mnist[digit]
    const available: number = group.length
    if (available < perClass) {
      throw new Error(
        `cap ${cap} needs ${perClass} samples of digit ${digit}, only ${available} bundled`,
      )
    }
    // seeded sample without replacement from this digit's pool
    const picked = new Set<number>()
    while (picked.size < perClass) {
      picked.add(Math.floor(rng() * available))
    }
    for (const idx of [...picked].sort((a, b) => a - b)) {
      inputs.push(group.get(idx))
      labels.push(digit)
    }
  }
  return { inputs, labels, name: 'mnist' }
}

/**
 * Digit-like synthetic stand-in: one random template per class plus
 * per-sample noise, clipped to [0, 1].  Used when the bundled MNIST data
 * is unavailable, and in fast tests.
 */
export function makeSynthetic(cap: number, seed: number): RawDataset {
  const perClass = Math.floor(cap / N_CLASSES)
  const rng = makeRng(seed)
  const templates: number[][] = []
  for (let c = 0; c < N_CLASSES; c++) {
    templates.push(Array.from({ length: IMAGE_DIM }, () => (rng() < 0.2 ? 0.9 : 0.1)))
  }
  const inputs: number[][] = []
  const labels: number[] = []
  for (let c = 0; c < N_CLASSES; c++) {
    for (let i = 0; i < perClass; i++) {
      const row = templates[c].map(v => {
        const noisy = v + (rng() - 0.5) * 0.4
        return Math.min(1, Math.max(0, noisy))
      })
      inputs.push(row)
      labels.push(c)
    }
  }
  return { inputs, labels, name: 'synthetic' }
}

/** Seeded Fisher-Yates permutation; keeps batches class-mixed under shuffle:false. */
export function shuffleInPlace(data: RawDataset, seed: number): RawDataset {
  const rng = makeRng(seed ^ 0x9e3779b9)
  for (let i = data.inputs.length - 1; i > 0; i--) {
    const j = Math.floor(rng() * (i + 1))
    ;[data.inputs[i], data.inputs[j]] = [data.inputs[j], data.inputs[i]]
    ;[data.labels[i], data.labels[j]] = [data.labels[j], data.labels[i]]
  }
  return data
}

export function loadData(name: DatasetName, cap: number, seed: number): RawDataset {
  if (name === 'mnist') {
    try {
      return shuffleInPlace(loadMnist(cap, seed), seed)
    } catch (err) {
      console.error(`mnist unavailable (${err}); falling back to synthetic data`)
      return shuffleInPlace(makeSynthetic(cap, seed), seed)
    }
  }
  return shuffleInPlace(makeSynthetic(cap, seed), seed)
}
