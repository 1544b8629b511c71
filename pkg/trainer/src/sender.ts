/** Speaker: meaning one-hot seeds the GRU state, characters roll out one per
 * step. Sampling runs without gradients; the REINFORCE update replays the
 * sampled characters teacher-forced to get differentiable log-probs. */

import * as tf from '@tensorflow/tfjs';
import { SpaceConfig } from './config.js';
import { GruParams, gruProject, gruStepFromProj, gruVars, makeGru, resetGru } from './gru.js';
import { Rng } from './rng.js';

/** Dense one-hot meanings for a list of meaning tuples. */
export function meaningMatrix(meanings: number[][], cards: number[]): tf.Tensor2D {
  const D = cards.reduce((a, b) => a + b, 0);
  const buf = new Float32Array(meanings.length * D);
  for (let i = 0; i < meanings.length; i++) {
    let off = 0;
    for (let a = 0; a < cards.length; a++) {
      buf[i * D + off + meanings[i][a]] = 1;
      off += cards[a];
    }
  }
  return tf.tensor2d(buf, [meanings.length, D]);
}

export class Sender {
  private static instances = 0;
  readonly space: SpaceConfig;
  readonly hidden: number;
  private Wm: tf.Variable; // [D, H] meaning encoder
  private bm: tf.Variable;
  private gru: GruParams; // input: previous char one-hot, dim C+1 (BOS = C)
  private Wout: tf.Variable; // [H, C]
  private bout: tf.Variable;

  constructor(space: SpaceConfig, hidden: number, rng: Rng) {
    this.space = space;
    this.hidden = hidden;
    const D = space.cardinalities.reduce((a, b) => a + b, 0);
    const C = space.vocabSize;
    // unique prefix: tf registers variables globally by name
    const prefix = `sender${Sender.instances++}`;
    this.Wm = tf.variable(tf.tensor2d(rng.glorot(D, hidden), [D, hidden]),
      true, `${prefix}/Wm`);
    this.bm = tf.variable(tf.zeros([hidden]), true, `${prefix}/bm`);
    this.gru = makeGru(C + 1, hidden, rng, `${prefix}/gru`);
    this.Wout = tf.variable(tf.tensor2d(rng.glorot(hidden, C), [hidden, C]),
      true, `${prefix}/Wout`);
    this.bout = tf.variable(tf.zeros([C]), true, `${prefix}/bout`);
  }

  vars(): tf.Variable[] {
    return [this.Wm, this.bm, ...gruVars(this.gru), this.Wout, this.bout];
  }

  reset(rng: Rng): void {
    const D = this.space.cardinalities.reduce((a, b) => a + b, 0);
    const C = this.space.vocabSize;
    this.Wm.assign(tf.tensor2d(rng.glorot(D, this.hidden), [D, this.hidden]));
    this.bm.assign(tf.zeros([this.hidden]));
    resetGru(this.gru, rng);
    this.Wout.assign(tf.tensor2d(rng.glorot(this.hidden, C), [this.hidden, C]));
    this.bout.assign(tf.zeros([C]));
  }

  private initialState(meanings: tf.Tensor2D): tf.Tensor {
    return tf.tanh(tf.add(tf.matMul(meanings, this.Wm), this.bm));
  }

  /** Input projection for one step of known characters (no gradient path;
   * indexes Wx rows directly instead of building one-hots). */
  private projectChars(prev: Int32Array): tf.Tensor {
    return tf.add(tf.gather(this.gru.Wx, tf.tensor1d(prev, 'int32')), this.gru.bx);
  }

  /** Decode one message per meaning row, character by character, either
   * sampling from the softmax or taking the argmax. */
  private rollout(meanings: tf.Tensor2D, pick: (probs: Float32Array, row: number) => number):
      number[][] {
    const B = meanings.shape[0];
    const C = this.space.vocabSize;
    const T = this.space.maxLen;
    const actions: number[][] = Array.from({ length: B }, () => []);
    tf.tidy(() => {
      let h = this.initialState(meanings);
      let prev = new Int32Array(B).fill(C);
      for (let t = 0; t < T; t++) {
        h = gruStepFromProj(this.gru, this.projectChars(prev), h);
        const probs = tf.softmax(tf.add(tf.matMul(h, this.Wout), this.bout));
        const flat = probs.dataSync() as Float32Array;
        const next = new Int32Array(B);
        for (let b = 0; b < B; b++) {
          next[b] = pick(flat, b);
          actions[b].push(next[b]);
        }
        prev = next;
      }
    });
    return actions;
  }

  /** Draw one fixed-length message per meaning row. Deterministic for a
   * given rng state: rows are consumed in order from synced prob buffers. */
  sample(meanings: tf.Tensor2D, rng: Rng): number[][] {
    const C = this.space.vocabSize;
    return this.rollout(meanings, (probs, b) => rng.categorical(probs, b * C, C));
  }

  /** Greedy argmax rollout, used for corpus export. */
  greedy(meanings: tf.Tensor2D): number[][] {
    const C = this.space.vocabSize;
    return this.rollout(meanings, (probs, b) => {
      let best = 0;
      for (let k = 1; k < C; k++) if (probs[b * C + k] > probs[b * C + best]) best = k;
      return best;
    });
  }

  /** Teacher-forced replay of sampled messages.
   * Returns the per-row summed log-prob [B] and the mean per-step policy
   * entropy (scalar). Differentiable; call inside a gradient function. */
  logProbAndEntropy(meanings: tf.Tensor2D, actions: number[][]):
      { logProb: tf.Tensor1D; entropy: tf.Scalar } {
    const B = meanings.shape[0];
    const C = this.space.vocabSize;
    const T = this.space.maxLen;
    const H = this.hidden;
    // step inputs: BOS then the first T-1 sampled chars; targets: all T chars
    const inBuf = new Float32Array(B * T * (C + 1));
    const tgtBuf = new Float32Array(B * T * C);
    for (let b = 0; b < B; b++) {
      for (let t = 0; t < T; t++) {
        const fed = t === 0 ? C : actions[b][t - 1];
        inBuf[(b * T + t) * (C + 1) + fed] = 1;
        tgtBuf[(b * T + t) * C + actions[b][t]] = 1;
      }
    }
    const proj = gruProject(this.gru, tf.tensor2d(inBuf, [B * T, C + 1]))
      .reshape([B, T, 3 * H]);
    const targets = tf.tensor3d(tgtBuf, [B, T, C]);
    let h = this.initialState(meanings);
    let logProb: tf.Tensor = tf.zeros([B]);
    let entSum: tf.Tensor = tf.scalar(0);
    for (let t = 0; t < T; t++) {
      const xp = proj.slice([0, t, 0], [B, 1, -1]).reshape([B, 3 * H]);
      h = gruStepFromProj(this.gru, xp, h);
      const logp = tf.logSoftmax(tf.add(tf.matMul(h, this.Wout), this.bout));
      const tgt = targets.slice([0, t, 0], [B, 1, -1]).reshape([B, C]);
      logProb = tf.add(logProb, tf.sum(tf.mul(tgt, logp), 1));
      entSum = tf.add(entSum, tf.neg(tf.mean(tf.sum(tf.mul(tf.exp(logp), logp), 1))));
    }
    return {
      logProb: logProb as tf.Tensor1D,
      entropy: tf.div(entSum, T) as tf.Scalar,
    };
  }
}
