/** Meaning-space configs in the corpus toolkit's key=value file format,
 * plus the agent hyperparameters (all of them logged, none hidden). */

import * as fs from 'fs';

export interface SpaceConfig {
  cardinalities: number[];
  vocabSize: number;
  maxLen: number;
  /** Per-attribute loss weights; uniform when absent. */
  weights?: number[];
}

export const PRESETS: Record<string, SpaceConfig> = {
  default: { cardinalities: [16, 16, 16], vocabSize: 8, maxLen: 9 },
  inflection: {
    cardinalities: [42, 2, 3],
    vocabSize: 8,
    maxLen: 9,
    weights: [0.9, 0.05, 0.05],
  },
  // CI-sized stand-ins: games on the full presets take hours on one core
  toy: { cardinalities: [4, 4, 4], vocabSize: 8, maxLen: 4 },
  desk: { cardinalities: [12, 2, 3], vocabSize: 8, maxLen: 9 },
  'desk-inflection': {
    cardinalities: [12, 2, 3],
    vocabSize: 8,
    maxLen: 9,
    weights: [0.9, 0.05, 0.05],
  },
};

export function parseConfig(text: string): SpaceConfig {
  const out: Partial<SpaceConfig> = {};
  for (const [lineno, raw] of text.split('\n').entries()) {
    const line = raw.trim();
    if (!line) continue;
    const eq = line.indexOf('=');
    if (eq < 0) throw new Error(`config line ${lineno + 1}: expected key=value`);
    const key = line.slice(0, eq).trim();
    const value = line.slice(eq + 1).trim();
    if (key === 'cardinalities') {
      out.cardinalities = value.split(',').map((x) => parseInt(x, 10));
    } else if (key === 'vocab_size') {
      out.vocabSize = parseInt(value, 10);
    } else if (key === 'max_len') {
      out.maxLen = parseInt(value, 10);
    } else if (key === 'weights') {
      out.weights = value.split(',').map(Number);
    } else {
      throw new Error(`config line ${lineno + 1}: unknown key ${key}`);
    }
  }
  if (!out.cardinalities || !out.vocabSize || !out.maxLen) {
    throw new Error('config missing cardinalities, vocab_size, or max_len');
  }
  if (out.cardinalities.some((c) => !Number.isInteger(c) || c < 1)) {
    throw new Error('cardinalities must be positive integers');
  }
  return out as SpaceConfig;
}

export function readConfig(path: string): SpaceConfig {
  return parseConfig(fs.readFileSync(path, 'utf-8'));
}

export function formatConfig(cfg: SpaceConfig): string {
  let text = `cardinalities=${cfg.cardinalities.join(',')}\n`;
  text += `vocab_size=${cfg.vocabSize}\n`;
  text += `max_len=${cfg.maxLen}\n`;
  if (cfg.weights) text += `weights=${cfg.weights.join(',')}\n`;
  return text;
}

export function writeConfig(cfg: SpaceConfig, path: string): void {
  fs.writeFileSync(path, formatConfig(cfg), 'utf-8');
}

/** Normalized per-attribute weights (uniform unless the config sets them). */
export function attrWeights(cfg: SpaceConfig): number[] {
  const n = cfg.cardinalities.length;
  if (!cfg.weights) return Array(n).fill(1 / n);
  const total = cfg.weights.reduce((a, b) => a + b, 0);
  return cfg.weights.map((w) => w / total);
}

export interface AgentConfig {
  space: SpaceConfig;
  /** GRU state width; 500 mirrors the reference setup, tests shrink it. */
  hiddenSize: number;
  embedSize: number;
  epsilon: number;
  /** Listener re-initialization period in epochs; 0 disables it. */
  resetInterval: number;
  maxEpochs: number;
  seed: number;
  learningRate: number;
  batchSize: number;
  /** REINFORCE entropy bonus on the sender's per-step policy. */
  entropyCoef: number;
  /** Weight of the supplementary cross-entropy term in the sender reward. */
  ceCoef: number;
  baseline: 'batch-mean';
  /** Scale advantages to unit variance; keeps the articulation penalty from
   * swamping the reconstruction signal early in training. */
  advNorm: 'std' | 'none';
  optimizer: 'adam';
}

export function agentConfig(space: SpaceConfig, overrides: Partial<AgentConfig> = {}): AgentConfig {
  const cfg: AgentConfig = {
    space,
    hiddenSize: 500,
    embedSize: 32,
    epsilon: 0,
    resetInterval: 0,
    maxEpochs: 1000,
    seed: 0,
    learningRate: 1e-3,
    batchSize: 512,
    entropyCoef: 0.1,
    ceCoef: 1,
    baseline: 'batch-mean',
    advNorm: 'std',
    optimizer: 'adam',
    ...overrides,
  };
  if (cfg.hiddenSize <= 0) throw new Error('hiddenSize must be positive');
  if (cfg.epsilon < 0) throw new Error('epsilon must be non-negative');
  if (cfg.resetInterval < 0) throw new Error('resetInterval must be non-negative');
  return cfg;
}

/** Enumerate the whole meaning space in lexicographic order. */
export function enumerateMeanings(cfg: SpaceConfig): number[][] {
  const out: number[][] = [];
  const n = cfg.cardinalities.length;
  const current = Array(n).fill(0);
  for (;;) {
    out.push([...current]);
    let i = n - 1;
    while (i >= 0) {
      current[i] += 1;
      if (current[i] < cfg.cardinalities[i]) break;
      current[i] = 0;
      i -= 1;
    }
    if (i < 0) return out;
  }
}
