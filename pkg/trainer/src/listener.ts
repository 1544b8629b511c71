/** Receiver: character embedding -> GRU -> one softmax head per attribute.
 * Trained with cross-entropy on (message -> meaning); reconstruction
 * accuracy is the (optionally weighted) mean of per-attribute exact-match
 * rates. */

import * as tf from '@tensorflow/tfjs';
import { SpaceConfig, attrWeights } from './config.js';
import { GruParams, gruProject, gruStepFromProj, gruVars, makeGru, resetGru } from './gru.js';
import { Rng } from './rng.js';

/** Messages padded to a common length, encoded once and sliced per batch. */
export interface EncodedMessages {
  /** [N, T, C+1] one-hot characters; row C is the padding symbol. */
  oneHot: tf.Tensor3D;
  /** [N, T] one at each message's final character; null when every message
   * ends at T-1 (the recurrence's last state is then used directly). */
  finalMask: tf.Tensor2D | null;
  count: number;
  maxLen: number;
}

export function encodeMessages(messages: number[][], vocabSize: number,
                               maxLen?: number): EncodedMessages {
  const T = maxLen ?? Math.max(...messages.map((m) => m.length));
  const N = messages.length;
  const pad = vocabSize;
  const chars = new Int32Array(N * T).fill(pad);
  const mask = new Float32Array(N * T);
  let uniform = true;
  for (let i = 0; i < N; i++) {
    const msg = messages[i];
    for (let t = 0; t < msg.length; t++) chars[i * T + t] = msg[t];
    mask[i * T + (msg.length - 1)] = 1;
    if (msg.length !== T) uniform = false;
  }
  const oneHot = tf.tidy(() =>
    tf.oneHot(tf.tensor2d(chars, [N, T], 'int32'), vocabSize + 1).asType('float32'),
  ) as tf.Tensor3D;
  return {
    oneHot,
    finalMask: uniform ? null : tf.tensor2d(mask, [N, T]),
    count: N,
    maxLen: T,
  };
}

export function disposeEncoded(enc: EncodedMessages): void {
  enc.oneHot.dispose();
  enc.finalMask?.dispose();
}

export class Listener {
  private static instances = 0;
  readonly space: SpaceConfig;
  readonly hidden: number;
  readonly embedSize: number;
  private embed: tf.Variable; // [C+1, E]
  private gru: GruParams;
  private heads: { W: tf.Variable; b: tf.Variable }[];
  private weights: number[];

  constructor(space: SpaceConfig, hidden: number, embedSize: number, rng: Rng) {
    this.space = space;
    this.hidden = hidden;
    this.embedSize = embedSize;
    this.weights = attrWeights(space);
    const C = space.vocabSize;
    // unique prefix: tf registers variables globally by name
    const prefix = `listener${Listener.instances++}`;
    this.embed = tf.variable(
      tf.tensor2d(rng.glorot(C + 1, embedSize), [C + 1, embedSize]),
      true, `${prefix}/embed`);
    this.gru = makeGru(embedSize, hidden, rng, `${prefix}/gru`);
    this.heads = space.cardinalities.map((card, i) => ({
      W: tf.variable(tf.tensor2d(rng.glorot(hidden, card), [hidden, card]),
        true, `${prefix}/head${i}/W`),
      b: tf.variable(tf.zeros([card]), true, `${prefix}/head${i}/b`),
    }));
  }

  vars(): tf.Variable[] {
    return [this.embed, ...gruVars(this.gru),
            ...this.heads.flatMap((h) => [h.W, h.b])];
  }

  reset(rng: Rng): void {
    const C = this.space.vocabSize;
    this.embed.assign(tf.tensor2d(rng.glorot(C + 1, this.embedSize), [C + 1, this.embedSize]));
    resetGru(this.gru, rng);
    this.space.cardinalities.forEach((card, i) => {
      this.heads[i].W.assign(tf.tensor2d(rng.glorot(this.hidden, card), [this.hidden, card]));
      this.heads[i].b.assign(tf.zeros([card]));
    });
  }

  /** Per-attribute logits from one-hot messages. Caller manages disposal
   * (wrap in tidy or a gradient function). */
  logits(oneHot: tf.Tensor3D, finalMask: tf.Tensor2D | null): tf.Tensor2D[] {
    const [B, T] = [oneHot.shape[0], oneHot.shape[1]];
    const H = this.hidden;
    // embed + project every timestep in two large matmuls
    const emb = tf.matMul(oneHot.reshape([B * T, this.space.vocabSize + 1]), this.embed);
    const proj = gruProject(this.gru, emb as tf.Tensor2D).reshape([B, T, 3 * H]);
    let h: tf.Tensor = tf.zeros([B, H]);
    let final: tf.Tensor | null = null;
    for (let t = 0; t < T; t++) {
      const xp = proj.slice([0, t, 0], [B, 1, -1]).reshape([B, 3 * H]);
      h = gruStepFromProj(this.gru, xp, h);
      if (finalMask !== null) {
        const masked = tf.mul(h, finalMask.slice([0, t], [B, 1]));
        final = final === null ? masked : tf.add(final, masked);
      }
    }
    final = final ?? h;
    return this.heads.map(({ W, b }) => tf.add(tf.matMul(final!, W), b) as tf.Tensor2D);
  }

  /** Weighted cross-entropy over attributes; labelOneHots[i] is [B, card_i]. */
  loss(oneHot: tf.Tensor3D, finalMask: tf.Tensor2D | null, labelOneHots: tf.Tensor2D[]): tf.Scalar {
    const logitsPer = this.logits(oneHot, finalMask);
    let total: tf.Tensor = tf.scalar(0);
    logitsPer.forEach((logits, i) => {
      const ce = tf.neg(tf.mean(tf.sum(tf.mul(labelOneHots[i], tf.logSoftmax(logits)), 1)));
      total = tf.add(total, tf.mul(ce, this.weights[i]));
    });
    return total as tf.Scalar;
  }

  /** Per-attribute 0/1 exact-match arrays for a batch (greedy argmax). */
  correctness(oneHot: tf.Tensor3D, finalMask: tf.Tensor2D | null, labels: Int32Array[]): Uint8Array[] {
    return this.evaluate(oneHot, finalMask, labels).correct;
  }

  /** Exact-match flags plus the per-row weighted cross-entropy, both
   * gradient-free; the latter feeds the sender's reward. */
  evaluate(oneHot: tf.Tensor3D, finalMask: tf.Tensor2D | null, labels: Int32Array[]):
      { correct: Uint8Array[]; ce: Float32Array } {
    return tf.tidy(() => {
      const logitsPer = this.logits(oneHot, finalMask);
      const B = oneHot.shape[0];
      const ce = new Float32Array(B);
      const correct = logitsPer.map((logits, i) => {
        const pred = logits.argMax(1).dataSync();
        const logp = tf.logSoftmax(logits).dataSync() as Float32Array;
        const card = this.space.cardinalities[i];
        const out = new Uint8Array(B);
        for (let b = 0; b < B; b++) {
          out[b] = pred[b] === labels[i][b] ? 1 : 0;
          ce[b] -= this.weights[i] * logp[b * card + labels[i][b]];
        }
        return out;
      });
      return { correct, ce };
    });
  }

  attrWeightVector(): number[] {
    return [...this.weights];
  }
}
