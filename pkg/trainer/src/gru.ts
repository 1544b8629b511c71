/** Single-layer GRU built from raw variables. Input-side projections are
 * split from hidden-side ones so a whole [B, T, in] sequence can be
 * projected in one matmul up front; the recurrent loop then only touches
 * [H, *] weights. Cuts the per-step op count roughly in half, which matters
 * on a dispatch-bound backend. */

import * as tf from '@tensorflow/tfjs';
import { Rng } from './rng.js';

export interface GruParams {
  /** [in, 3H]: update gate, reset gate, candidate (in that order). */
  Wx: tf.Variable;
  bx: tf.Variable;
  /** [H, 2H]: hidden projections for the two gates. */
  Whzr: tf.Variable;
  /** [H, H]: hidden projection for the candidate. */
  Whc: tf.Variable;
  inDim: number;
  hidden: number;
}

export function makeGru(inDim: number, hidden: number, rng: Rng, prefix: string): GruParams {
  return {
    Wx: tf.variable(tf.tensor2d(rng.glorot(inDim, 3 * hidden), [inDim, 3 * hidden]),
      true, `${prefix}/Wx`),
    bx: tf.variable(tf.zeros([3 * hidden]), true, `${prefix}/bx`),
    Whzr: tf.variable(tf.tensor2d(rng.glorot(hidden, 2 * hidden), [hidden, 2 * hidden]),
      true, `${prefix}/Whzr`),
    Whc: tf.variable(tf.tensor2d(rng.glorot(hidden, hidden), [hidden, hidden]),
      true, `${prefix}/Whc`),
    inDim,
    hidden,
  };
}

export function gruVars(p: GruParams): tf.Variable[] {
  return [p.Wx, p.bx, p.Whzr, p.Whc];
}

export function resetGru(p: GruParams, rng: Rng): void {
  p.Wx.assign(tf.tensor2d(rng.glorot(p.inDim, 3 * p.hidden), [p.inDim, 3 * p.hidden]));
  p.bx.assign(tf.zeros([3 * p.hidden]));
  p.Whzr.assign(tf.tensor2d(rng.glorot(p.hidden, 2 * p.hidden), [p.hidden, 2 * p.hidden]));
  p.Whc.assign(tf.tensor2d(rng.glorot(p.hidden, p.hidden), [p.hidden, p.hidden]));
}

/** Project inputs for every timestep at once: [B*T, in] -> [B*T, 3H]. */
export function gruProject(p: GruParams, flatX: tf.Tensor2D): tf.Tensor2D {
  return tf.add(tf.matMul(flatX, p.Wx), p.bx) as tf.Tensor2D;
}

/** One recurrence step from a precomputed input projection [B, 3H]. */
export function gruStepFromProj(p: GruParams, xProj: tf.Tensor, h: tf.Tensor): tf.Tensor {
  const H = p.hidden;
  const B = xProj.shape[0]!;
  const zr = tf.sigmoid(tf.add(xProj.slice([0, 0], [B, 2 * H]), tf.matMul(h, p.Whzr)));
  const z = zr.slice([0, 0], [B, H]);
  const r = zr.slice([0, H], [B, H]);
  const c = tf.tanh(tf.add(xProj.slice([0, 2 * H], [B, H]), tf.matMul(tf.mul(r, h), p.Whc)));
  // h + z*(c - h) == (1-z)*h + z*c, two ops cheaper
  return tf.add(h, tf.mul(z, tf.sub(c, h)));
}

/** Convenience single step from a raw input [B, in]. */
export function gruStep(p: GruParams, x: tf.Tensor, h: tf.Tensor): tf.Tensor {
  return gruStepFromProj(p, gruProject(p, x as tf.Tensor2D), h);
}
