import * as tf from '@tensorflow/tfjs'

import { N_CLASSES } from './data'
import { TrainedModel } from './model'

export interface AttackRecord {
  id: number
  epsilon: number
  actual: number
  adversarial: number
}

/**
 * Fast gradient sign step on a batch: x' = clip(x + eps * sign(dL/dx)).
 * The loss is taken against the model's own clean predictions, so eps = 0
 * reproduces them exactly.
 */
export function fgsmPredictions(
  trained: TrainedModel,
  inputs: number[][],
  cleanPredictions: number[],
  epsilon: number,
): number[] {
  return tf.tidy(() => {
    const x = tf.tensor2d(inputs)
    const y = tf.oneHot(tf.tensor1d(cleanPredictions, 'int32'), N_CLASSES)
    // cross-entropy against the model's own softmax output
    const lossFn = (xs: tf.Tensor) => {
      const probs = trained.model.apply(xs) as tf.Tensor
      return tf.neg(tf.sum(y.mul(probs.clipByValue(1e-7, 1).log()))).asScalar()
    }
    const grad = tf.grad(lossFn)(x)
    const adv = x.add(grad.sign().mul(epsilon)).clipByValue(0, 1)
    const preds = (trained.model.predict(adv) as tf.Tensor).argMax(-1)
    return Array.from(preds.dataSync()).map(Number)
  })
}

export function runFgsm(
  trained: TrainedModel,
  inputs: number[][],
  ids: number[],
  epsilons: number[],
): AttackRecord[] {
  const records: AttackRecord[] = []
  for (const eps of epsilons) {
    const adv = fgsmPredictions(trained, inputs, trained.cleanPredictions, eps)
    for (let i = 0; i < ids.length; i++) {
      records.push({
        id: ids[i],
        epsilon: eps,
        actual: trained.cleanPredictions[i],
        adversarial: adv[i],
      })
    }
  }
  return records
}

export function misclassificationRate(records: AttackRecord[], epsilon: number): number {
  const slice = records.filter(r => r.epsilon === epsilon)
  if (slice.length === 0) return 0
  return slice.filter(r => r.actual !== r.adversarial).length / slice.length
}
