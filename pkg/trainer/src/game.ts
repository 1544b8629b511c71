/** The reconstruction game. A sender maps meanings to messages, a listener
 * maps messages back; the sender learns from REINFORCE on reconstruction
 * reward minus the articulation penalty, the listener from plain
 * cross-entropy on the sampled pairs. With resetInterval > 0 the listener
 * is periodically re-initialized (fresh weights and optimizer) while the
 * sender persists.
 */

import * as tf from '@tensorflow/tfjs';
import { articulationLoss, violationRate, violations } from './articulation.js';
import { initBackend } from './backend.js';
import { AgentConfig, attrWeights, enumerateMeanings } from './config.js';
import { CorpusPair } from './corpus.js';
import { disposeEncoded, encodeMessages, Listener } from './listener.js';
import { meaningMatrix, Sender } from './sender.js';
import { Rng } from './rng.js';

export interface EpochStats {
  epoch: number;
  /** Attribute-weighted accuracy on this epoch's sampled batch. */
  accuracy: number;
  perAttrAcc: number[];
  reward: number;
  /** Mean epsilon-scaled articulation penalty over the batch. */
  articulationLoss: number;
  violationRate: number;
  listenerLoss: number;
  senderLoss: number;
}

export interface ArticulationSample {
  message: number[];
  loss: number;
}

export interface TrainResult {
  config: AgentConfig;
  epochsRun: number;
  /** First epoch whose batch accuracy exceeded 0.99, null if never. */
  epochsTo99: number | null;
  /** Final (greedy, full-space) weighted accuracy reached 0.9. */
  success: boolean;
  finalAccuracy: number;
  finalPerAttrAcc: number[];
  /** Mean parity-violation rate of the exported messages. */
  meanViolationRate: number;
  curve: EpochStats[];
  /** Greedy decode of every meaning, in enumeration order. */
  corpus: CorpusPair[];
  /** Post-training sampled messages with their logged articulation loss. */
  articulationSamples: ArticulationSample[];
  /** Epochs after which the listener was re-initialized. */
  resets: number[];
}

export interface TrainOptions {
  /** Stop once the greedy full-space weighted accuracy reaches this. */
  earlyStopAcc?: number;
  /** How often (in epochs) to run the greedy check (default 25). */
  evalEvery?: number;
  minEpochs?: number;
  /** Keep every Nth epoch in the curve (default 1). */
  logEvery?: number;
  articulationSampleCount?: number;
  onEpoch?: (stats: EpochStats) => void;
}

interface BatchTensors {
  meanings: tf.Tensor2D;
  labels: Int32Array[];
  labelOneHots: tf.Tensor2D[];
}

function buildBatch(meanings: number[][], idx: Int32Array, cards: number[]): BatchTensors {
  const picked = Array.from(idx, (i) => meanings[i]);
  const labels = cards.map((_, a) =>
    Int32Array.from(idx, (i) => meanings[i][a]));
  const labelOneHots = cards.map((card, a) => {
    const buf = new Float32Array(idx.length * card);
    for (let b = 0; b < idx.length; b++) buf[b * card + labels[a][b]] = 1;
    return tf.tensor2d(buf, [idx.length, card]);
  });
  return { meanings: meaningMatrix(picked, cards), labels, labelOneHots };
}

function disposeBatch(batch: BatchTensors): void {
  batch.meanings.dispose();
  batch.labelOneHots.forEach((t) => t.dispose());
}

function applyGrads(optimizer: tf.Optimizer,
                    fn: () => tf.Scalar, vars: tf.Variable[]): number {
  const { value, grads } = tf.variableGrads(fn, vars);
  optimizer.applyGradients(grads);
  const loss = value.dataSync()[0];
  value.dispose();
  Object.values(grads).forEach((g) => g.dispose());
  return loss;
}

export async function trainGame(cfg: AgentConfig, opts: TrainOptions = {}): Promise<TrainResult> {
  await initBackend();
  const space = cfg.space;
  const cards = space.cardinalities;
  const weights = attrWeights(space);
  const C = space.vocabSize;
  const T = space.maxLen;
  const meanings = enumerateMeanings(space);
  const M = meanings.length;
  const B = cfg.batchSize;
  const fullBatch = B === M;

  const initRng = new Rng(cfg.seed);
  // separate stream so sampling draws don't shift when layer sizes change
  const drawRng = new Rng(cfg.seed * 2654435761 + 1);
  const sender = new Sender(space, cfg.hiddenSize, initRng);
  const listener = new Listener(space, cfg.hiddenSize, cfg.embedSize, initRng);
  const senderOpt = tf.train.adam(cfg.learningRate);
  let listenerOpt = tf.train.adam(cfg.learningRate);

  const logEvery = opts.logEvery ?? 1;
  const evalEvery = opts.evalEvery ?? 25;
  const minEpochs = opts.minEpochs ?? 0;
  const curve: EpochStats[] = [];
  const resets: number[] = [];
  let epochsTo99: number | null = null;
  let epochsRun = 0;
  const cached: BatchTensors | null = fullBatch
    ? buildBatch(meanings, Int32Array.from({ length: M }, (_, i) => i), cards)
    : null;
  const allMeanings = cached ? cached.meanings : meaningMatrix(meanings, cards);
  const allLabels = cached ? cached.labels
    : cards.map((_, a) => Int32Array.from(meanings, (m) => m[a]));

  const greedyAccuracy = (): number => {
    const exported = sender.greedy(allMeanings);
    const enc = encodeMessages(exported, C, T);
    const correct = listener.correctness(enc.oneHot, enc.finalMask, allLabels);
    disposeEncoded(enc);
    let acc = 0;
    for (let a = 0; a < cards.length; a++) {
      let s = 0;
      for (let b = 0; b < M; b++) s += correct[a][b];
      acc += weights[a] * (s / M);
    }
    return acc;
  };

  for (let epoch = 1; epoch <= cfg.maxEpochs; epoch++) {
    epochsRun = epoch;
    let batch: BatchTensors;
    if (cached) {
      batch = cached;
    } else {
      const idx = new Int32Array(B);
      for (let b = 0; b < B; b++) idx[b] = drawRng.int(M);
      batch = buildBatch(meanings, idx, cards);
    }

    const actions = sender.sample(batch.meanings, drawRng);
    const enc = encodeMessages(actions, C, T);
    const { correct, ce } = listener.evaluate(enc.oneHot, enc.finalMask, batch.labels);

    const rewards = new Float32Array(B);
    const attrAccSum = new Float64Array(cards.length);
    let accSum = 0;
    let artSum = 0;
    let vioRateSum = 0;
    for (let b = 0; b < B; b++) {
      let acc = 0;
      for (let a = 0; a < cards.length; a++) {
        acc += weights[a] * correct[a][b];
        attrAccSum[a] += correct[a][b];
      }
      const v = violations(actions[b]);
      rewards[b] = acc - cfg.ceCoef * ce[b] - cfg.epsilon * v;
      accSum += acc;
      artSum += cfg.epsilon * v;
      vioRateSum += violationRate(actions[b]);
    }
    let meanReward = 0;
    for (let b = 0; b < B; b++) meanReward += rewards[b];
    meanReward /= B;
    let advScale = 1;
    if (cfg.advNorm === 'std') {
      let varSum = 0;
      for (let b = 0; b < B; b++) varSum += (rewards[b] - meanReward) ** 2;
      advScale = 1 / (Math.sqrt(varSum / B) + 1e-8);
    }

    const listenerLoss = applyGrads(
      listenerOpt,
      () => listener.loss(enc.oneHot, enc.finalMask, batch.labelOneHots),
      listener.vars());

    const adv = tf.tensor1d(Float32Array.from(rewards, (r) => (r - meanReward) * advScale));
    const senderLoss = applyGrads(
      senderOpt,
      () => {
        const { logProb, entropy } = sender.logProbAndEntropy(batch.meanings, actions);
        return tf.sub(tf.neg(tf.mean(tf.mul(adv, logProb))),
                      tf.mul(cfg.entropyCoef, entropy)) as tf.Scalar;
      },
      sender.vars());
    adv.dispose();
    disposeEncoded(enc);
    if (!cached) disposeBatch(batch);

    const stats: EpochStats = {
      epoch,
      accuracy: accSum / B,
      perAttrAcc: Array.from(attrAccSum, (s) => s / B),
      reward: meanReward,
      articulationLoss: artSum / B,
      violationRate: vioRateSum / B,
      listenerLoss,
      senderLoss,
    };
    if (epoch % logEvery === 0 || epoch === cfg.maxEpochs) curve.push(stats);
    opts.onEpoch?.(stats);
    if (epochsTo99 === null && stats.accuracy > 0.99) epochsTo99 = epoch;

    if (opts.earlyStopAcc !== undefined && epoch >= minEpochs
        && epoch % evalEvery === 0 && stats.accuracy >= opts.earlyStopAcc - 0.1
        && greedyAccuracy() >= opts.earlyStopAcc) {
      break;
    }
    if (cfg.resetInterval > 0 && epoch % cfg.resetInterval === 0 && epoch < cfg.maxEpochs) {
      listener.reset(initRng);
      listenerOpt.dispose();
      listenerOpt = tf.train.adam(cfg.learningRate);
      resets.push(epoch);
    }
  }

  // export and final scoring use the deterministic greedy language
  const exported = sender.greedy(allMeanings);
  const encAll = encodeMessages(exported, C, T);
  const finalCorrect = listener.correctness(encAll.oneHot, encAll.finalMask, allLabels);
  disposeEncoded(encAll);
  const finalPerAttrAcc = cards.map((_, a) => {
    let s = 0;
    for (let b = 0; b < M; b++) s += finalCorrect[a][b];
    return s / M;
  });
  const finalAccuracy = finalPerAttrAcc.reduce((s, acc, a) => s + weights[a] * acc, 0);
  const corpus: CorpusPair[] = meanings.map((meaning, i) => ({
    meaning, message: exported[i],
  }));
  let vioSum = 0;
  for (const msg of exported) vioSum += violationRate(msg);

  const sampleCount = opts.articulationSampleCount ?? 1000;
  const sampleRng = new Rng(cfg.seed * 2654435761 + 2);
  const articulationSamples: ArticulationSample[] = [];
  while (articulationSamples.length < sampleCount) {
    const n = Math.min(B, sampleCount - articulationSamples.length);
    const idx = Int32Array.from({ length: n }, () => sampleRng.int(M));
    const mt = meaningMatrix(Array.from(idx, (i) => meanings[i]), cards);
    for (const message of sender.sample(mt, sampleRng)) {
      articulationSamples.push({ message, loss: articulationLoss(message, cfg.epsilon) });
    }
    mt.dispose();
  }

  if (cached) disposeBatch(cached);
  else allMeanings.dispose();
  senderOpt.dispose();
  listenerOpt.dispose();
  [...sender.vars(), ...listener.vars()].forEach((v) => v.dispose());

  return {
    config: cfg,
    epochsRun,
    epochsTo99,
    success: finalAccuracy >= 0.9,
    finalAccuracy,
    finalPerAttrAcc,
    meanViolationRate: vioSum / M,
    curve,
    corpus,
    articulationSamples,
    resets,
  };
}
