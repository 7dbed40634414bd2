import * as tf from '@tensorflow/tfjs'

import { HarnessConfig } from './config'
import { IMAGE_DIM, N_CLASSES, RawDataset } from './data'

export interface TrainedModel {
  model: tf.LayersModel
  /** maps raw [m, 784] inputs to the penultimate activation */
  penultimate: tf.LayersModel
  cleanAccuracy: number
  /** model predictions on the clean training inputs */
  cleanPredictions: number[]
}

function buildMlp(seed: number): tf.LayersModel {
  const model = tf.sequential()
  model.add(
    tf.layers.dense({
      inputShape: [IMAGE_DIM],
      units: 64,
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
      name: 'hidden',
    }),
  )
  model.add(
    tf.layers.dense({
      units: N_CLASSES,
      activation: 'softmax',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
      name: 'logits',
    }),
  )
  return model
}

function buildSmallConvnet(seed: number): tf.LayersModel {
  const model = tf.sequential()
  model.add(tf.layers.reshape({ inputShape: [IMAGE_DIM], targetShape: [28, 28, 1] }))
  model.add(
    tf.layers.conv2d({
      filters: 8,
      kernelSize: 3,
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
    }),
  )
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }))
  model.add(
    tf.layers.conv2d({
      filters: 16,
      kernelSize: 3,
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    }),
  )
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }))
  model.add(tf.layers.flatten())
  model.add(
    tf.layers.dense({
      units: 32,
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
      name: 'hidden',
    }),
  )
  model.add(
    tf.layers.dense({
      units: N_CLASSES,
      activation: 'softmax',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 3 }),
      name: 'logits',
    }),
  )
  return model
}

export async function trainModel(
  data: RawDataset,
  cfg: HarnessConfig,
): Promise<TrainedModel> {
  const model = cfg.model === 'mlp' ? buildMlp(cfg.seed) : buildSmallConvnet(cfg.seed)
  model.compile({
    optimizer: tf.train.adam(1e-3),
    loss: 'categoricalCrossentropy',
    metrics: ['accuracy'],
  })
  const x = tf.tensor2d(data.inputs)
  const y = tf.oneHot(tf.tensor1d(data.labels, 'int32'), N_CLASSES)
  const history = await model.fit(x, y, {
    epochs: cfg.epochs,
    batchSize: 32,
    shuffle: false, // keep the pass order deterministic
    verbose: 0,
  })
  const accSeries = history.history['acc'] ?? history.history['accuracy']
  const cleanAccuracy = Number(accSeries[accSeries.length - 1])
  if (!Number.isFinite(cleanAccuracy)) {
    x.dispose()
    y.dispose()
    throw new Error('training diverged: non-finite accuracy')
  }

  const hidden = model.getLayer('hidden')
  const penultimate = tf.model({
    inputs: model.inputs,
    outputs: hidden.output as tf.SymbolicTensor,
  })

  const predsTensor = (model.predict(x) as tf.Tensor).argMax(-1)
  const cleanPredictions = Array.from(await predsTensor.data()).map(Number)
  predsTensor.dispose()
  x.dispose()
  y.dispose()
  return { model, penultimate, cleanAccuracy, cleanPredictions }
}

/** Penultimate activations for raw inputs, as plain arrays. */
export function penultimateFeatures(
  trained: TrainedModel,
  inputs: number[][],
): number[][] {
  return tf.tidy(() => {
    const x = tf.tensor2d(inputs)
    const out = trained.penultimate.predict(x) as tf.Tensor
    return (out.arraySync() as number[][]).map(row => row.slice())
  })
}
