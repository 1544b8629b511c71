/** How fast a fresh listener learns a fixed language. Supervised training on
 * (message -> meaning) pairs; the score is the first epoch whose full-corpus
 * mean attribute accuracy exceeds 99%, with a hard cap standing in for
 * "never". Lower is easier. */

import * as tf from '@tensorflow/tfjs';
import { initBackend } from './backend.js';
import { SpaceConfig } from './config.js';
import { CorpusPair } from './corpus.js';
import { disposeEncoded, encodeMessages, Listener } from './listener.js';
import { Rng } from './rng.js';

export interface LearnabilityOptions {
  seed?: number;
  hidden?: number;
  embedSize?: number;
  learningRate?: number;
  batchSize?: number;
  /** Epoch cap; a corpus that never converges scores exactly this. */
  cap?: number;
  threshold?: number;
  onEpoch?: (epoch: number, accuracy: number) => void;
}

export interface LearnabilityResult {
  /** First converged epoch, or the cap when convergence never happened. */
  epochs: number;
  reachedCap: boolean;
  cap: number;
  /** Accuracy at each evaluated epoch (sparse; see the gating note below). */
  curve: { epoch: number; accuracy: number }[];
}

const EVAL_CHUNK = 2048;

// Full-corpus evaluation costs about a fifth of an epoch, so it is skipped
// while the training loss is far above anything compatible with 99% accuracy.
// Mean weighted CE of 0.35 nats corresponds to ~70% average true-class
// probability; the 99% crossing sits near 0.05-0.1, so the gate cannot delay
// detection. Every fifth epoch still gets evaluated to anchor the curve.
const EVAL_CE_GATE = 0.35;
const EVAL_STRIDE = 5;

export async function listenerLearnability(
  pairs: CorpusPair[], space: SpaceConfig,
  opts: LearnabilityOptions = {}): Promise<LearnabilityResult> {
  await initBackend();
  const seed = opts.seed ?? 0;
  const hidden = opts.hidden ?? 64;
  const embedSize = opts.embedSize ?? 32;
  const lr = opts.learningRate ?? 2e-3;
  const cap = opts.cap ?? 100;
  const threshold = opts.threshold ?? 0.99;
  const N = pairs.length;
  // small batches: convergence is scored in epochs, so the per-epoch update
  // count is part of the protocol, not just a throughput knob. Together with
  // hidden 64 and Adam 2e-3 this puts the (16,16,16) reference corpora close
  // to their published epoch counts at a width CPUs can afford.
  const batchSize = Math.min(opts.batchSize ?? 128, N);
  const cards = space.cardinalities;
  const C = space.vocabSize;
  const T = Math.max(...pairs.map((p) => p.message.length));

  const rng = new Rng(seed);
  const listener = new Listener(space, hidden, embedSize, rng);
  const optimizer: tf.Optimizer = tf.train.adam(lr);
  const messages = pairs.map((p) => p.message);
  const labels = cards.map((_, a) => Int32Array.from(pairs, (p) => p.meaning[a]));

  const evalAccuracy = (): number => {
    const attrHits = new Float64Array(cards.length);
    for (let start = 0; start < N; start += EVAL_CHUNK) {
      const stop = Math.min(start + EVAL_CHUNK, N);
      const enc = encodeMessages(messages.slice(start, stop), C, T);
      const chunkLabels = cards.map((_, a) => labels[a].slice(start, stop));
      const correct = listener.correctness(enc.oneHot, enc.finalMask, chunkLabels);
      disposeEncoded(enc);
      for (let a = 0; a < cards.length; a++) {
        for (let b = 0; b < stop - start; b++) attrHits[a] += correct[a][b];
      }
    }
    let acc = 0;
    for (let a = 0; a < cards.length; a++) acc += attrHits[a] / N;
    return acc / cards.length;
  };

  const order = Int32Array.from({ length: N }, (_, i) => i);
  const curve: { epoch: number; accuracy: number }[] = [];
  for (let epoch = 1; epoch <= cap; epoch++) {
    rng.shuffle(order);
    let ceSum = 0;
    let batches = 0;
    for (let start = 0; start < N; start += batchSize) {
      const idx = order.slice(start, Math.min(start + batchSize, N));
      const B = idx.length;
      const enc = encodeMessages(Array.from(idx, (i) => messages[i]), C, T);
      const labelOneHots = cards.map((card, a) => {
        const buf = new Float32Array(B * card);
        for (let b = 0; b < B; b++) buf[b * card + labels[a][idx[b]]] = 1;
        return tf.tensor2d(buf, [B, card]);
      });
      const { value, grads } = tf.variableGrads(
        () => listener.loss(enc.oneHot, enc.finalMask, labelOneHots),
        listener.vars());
      optimizer.applyGradients(grads);
      ceSum += value.dataSync()[0];
      batches++;
      value.dispose();
      Object.values(grads).forEach((g) => g.dispose());
      labelOneHots.forEach((t) => t.dispose());
      disposeEncoded(enc);
    }
    if (ceSum / batches >= EVAL_CE_GATE && epoch % EVAL_STRIDE !== 0) continue;
    const accuracy = evalAccuracy();
    curve.push({ epoch, accuracy });
    opts.onEpoch?.(epoch, accuracy);
    if (accuracy > threshold) {
      optimizer.dispose();
      listener.vars().forEach((v) => v.dispose());
      return { epochs: epoch, reachedCap: false, cap, curve };
    }
  }
  optimizer.dispose();
  listener.vars().forEach((v) => v.dispose());
  return { epochs: cap, reachedCap: true, cap, curve };
}
