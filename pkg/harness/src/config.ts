export type DatasetName = 'mnist' | 'synthetic'
export type ModelName = 'mlp' | 'small-convnet'
export type FeatureSource = 'input-space' | 'penultimate'

export interface HarnessConfig {
  dataset: DatasetName
  model: ModelName
  epsilons: number[]
  cap: number
  features: FeatureSource
  seed: number
  epochs: number
  outDir: string
}

export const DEFAULT_EPSILONS = Array.from({ length: 20 }, (_, i) =>
  Math.round((0.1 * (i + 1)) * 1e10) / 1e10,
)

export const DEFAULTS: HarnessConfig = {
  dataset: 'mnist',
  model: 'mlp',
  epsilons: DEFAULT_EPSILONS,
  cap: 2000,
  features: 'input-space',
  seed: 0,
  epochs: 10,
  outDir: 'harness_out',
}

export function validateConfig(cfg: HarnessConfig): HarnessConfig {
  if (cfg.epsilons.some(e => !(e >= 0))) {
    throw new Error(`epsilon values must be >= 0, got ${cfg.epsilons}`)
  }
  if (cfg.epsilons.length === 0) {
    throw new Error('at least one epsilon value is required')
  }
  if (!Number.isInteger(cfg.cap) || cfg.cap < 10) {
    throw new Error(`sample cap must be an integer >= 10, got ${cfg.cap}`)
  }
  if (!Number.isInteger(cfg.seed)) {
    throw new Error(`seed must be an integer, got ${cfg.seed}`)
  }
  return cfg
}

export function parseEpsilons(text: string): number[] {
  return text
    .split(',')
    .map(s => s.trim())
    .filter(s => s.length > 0)
    .map(s => {
      const v = Number(s)
      if (!Number.isFinite(v)) throw new Error(`bad epsilon value: ${s}`)
      return v
    })
}
