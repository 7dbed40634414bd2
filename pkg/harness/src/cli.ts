#!/usr/bin/env node
import * as path from 'path'

import yargs from 'yargs'
import { hideBin } from 'yargs/helpers'

import {
  DEFAULTS,
  DatasetName,
  FeatureSource,
  HarnessConfig,
  ModelName,
  parseEpsilons,
  validateConfig,
} from './config'
import { loadData } from './data'
import { penultimateFeatures, trainModel } from './model'
import { runFgsm } from './fgsm'
import {
  ensureDir,
  removeOutputs,
  writeAttackLogCsv,
  writeDatasetBinary,
  writeDatasetCsv,
} from './export'

function configFrom(argv: Record<string, unknown>): HarnessConfig {
  return validateConfig({
    dataset: (argv.dataset as DatasetName) ?? DEFAULTS.dataset,
    model: (argv.model as ModelName) ?? DEFAULTS.model,
    epsilons: argv.epsilons ? parseEpsilons(String(argv.epsilons)) : DEFAULTS.epsilons,
    cap: argv.cap !== undefined ? Number(argv.cap) : DEFAULTS.cap,
    features: (argv.features as FeatureSource) ?? DEFAULTS.features,
    seed: argv.seed !== undefined ? Number(argv.seed) : DEFAULTS.seed,
    epochs: argv.epochs !== undefined ? Number(argv.epochs) : DEFAULTS.epochs,
    outDir: (argv.out as string) ?? DEFAULTS.outDir,
  })
}

const OUTPUT_NAMES = ['dataset.csv', 'dataset.bin', 'attack_log.csv']

export async function runAll(cfg: HarnessConfig): Promise<void> {
  ensureDir(cfg.outDir)
  const data = loadData(cfg.dataset, cfg.cap, cfg.seed)
  console.log(`loaded ${data.inputs.length} ${data.name} samples`)
  try {
    const trained = await trainModel(data, cfg)
    console.log(`clean training accuracy: ${trained.cleanAccuracy.toFixed(4)}`)

    const ids = data.inputs.map((_, i) => i)
    const feats =
      cfg.features === 'penultimate'
        ? penultimateFeatures(trained, data.inputs)
        : data.inputs
    // exported labels are the model's clean predictions, not ground truth
    writeDatasetCsv(path.join(cfg.outDir, 'dataset.csv'), ids, trained.cleanPredictions, feats)
    writeDatasetBinary(path.join(cfg.outDir, 'dataset.bin'), ids, trained.cleanPredictions, feats)

    const records = runFgsm(trained, data.inputs, ids, cfg.epsilons)
    writeAttackLogCsv(path.join(cfg.outDir, 'attack_log.csv'), records)
    const flips = records.filter(r => r.actual !== r.adversarial).length
    console.log(
      `wrote ${records.length} attack records (${flips} misclassified) to ${cfg.outDir}`,
    )
  } catch (err) {
    removeOutputs(cfg.outDir, OUTPUT_NAMES)
    throw err
  }
}

function commonOptions(y: yargs.Argv): yargs.Argv {
  return y
    .option('dataset', { choices: ['mnist', 'synthetic'] as const, describe: 'data source' })
    .option('model', { choices: ['mlp', 'small-convnet'] as const })
    .option('epsilons', { type: 'string', describe: 'comma list of epsilon values' })
    .option('cap', { type: 'number', describe: 'sample cap (default 2000)' })
    .option('features', { choices: ['input-space', 'penultimate'] as const })
    .option('seed', { type: 'number' })
    .option('epochs', { type: 'number' })
    .option('out', { type: 'string', describe: 'output directory' })
}

async function main(): Promise<void> {
  await yargs(hideBin(process.argv))
    .command(
      'run-all',
      'train, export the dataset, run FGSM, write the attack log',
      commonOptions,
      async argv => runAll(configFrom(argv)),
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(JSON.stringify({ error: err?.name ?? 'UsageError', message: msg ?? String(err) }))
      process.exit(1)
    })
    .parseAsync()
}

if (require.main === module) {
  main().catch(err => {
    console.error(JSON.stringify({ error: err.name ?? 'Error', message: String(err.message ?? err) }))
    process.exit(1)
  })
}
