#!/usr/bin/env node
/** Command-line front end: train / iterate / learnability.
 * Exit codes: 0 success, 1 runtime failure, 2 usage. */

import * as fs from 'fs';
import * as path from 'path';
import { parseArgs } from 'node:util';
import { agentConfig, PRESETS, readConfig, SpaceConfig } from './config.js';
import { readCorpus, writeCorpus } from './corpus.js';
import { trainGame, TrainOptions } from './game.js';
import { listenerLearnability } from './learnability.js';
import { writeTrainLog } from './log.js';

const USAGE = `usage: artlang-trainer <command> [options]

commands:
  train          play the reconstruction game, export corpus + log
  iterate        train with periodic listener resets (default every 100 epochs)
  learnability   epochs a fresh listener needs to exceed 99% on a corpus

train / iterate options:
  --preset NAME        default | inflection | toy | desk | desk-inflection
                       (default: default)
  --config PATH        key=value space config (overrides --preset)
  --epsilon X          articulation penalty weight (default 0)
  --seed N             (default 0)
  --reset-interval N   listener reset period; 0 = off
  --hidden N           GRU width (default 500)
  --embed N            listener embedding width (default 32)
  --epochs N           cap (default 1000)
  --batch N            batch size (default 512)
  --lr X               Adam learning rate (default 0.001)
  --entropy X          sender entropy bonus (default 0.1)
  --early-stop X       stop after accuracy holds at X (off by default)
  --label NAME         output stem prefix (default run)
  --out-dir DIR        (default .)
  --log-every N        curve thinning (default 1)
  --quiet              no progress lines

learnability options:
  artlang-trainer learnability CORPUS.tsv [--config PATH | --preset NAME]
                 [--seed N] [--cap N] [--hidden N] [--embed N]
                 [--batch N] [--lr X] [--out RESULT.json]
  (without --config, the <stem>.config sidecar next to the corpus is used)
`;

class UsageError extends Error {}

function intOpt(raw: string | undefined, name: string, dflt: number): number {
  if (raw === undefined) return dflt;
  const v = Number(raw);
  if (!Number.isInteger(v)) throw new UsageError(`--${name} expects an integer, got ${JSON.stringify(raw)}`);
  return v;
}

function floatOpt(raw: string | undefined, name: string, dflt: number): number {
  if (raw === undefined) return dflt;
  const v = Number(raw);
  if (!Number.isFinite(v)) throw new UsageError(`--${name} expects a number, got ${JSON.stringify(raw)}`);
  return v;
}

function resolveSpace(configPath: string | undefined, preset: string | undefined,
                      sidecarOf?: string): SpaceConfig {
  if (configPath) return readConfig(configPath);
  if (!preset && sidecarOf) {
    const sidecar = sidecarOf.replace(/\.[^.]*$/, '') + '.config';
    if (fs.existsSync(sidecar)) return readConfig(sidecar);
    throw new UsageError(`no --config/--preset and no sidecar ${sidecar}`);
  }
  const name = preset ?? 'default';
  const space = PRESETS[name];
  if (!space) throw new UsageError(`unknown preset ${JSON.stringify(name)}`);
  return space;
}

const TRAIN_OPTIONS = {
  preset: { type: 'string' },
  config: { type: 'string' },
  epsilon: { type: 'string' },
  seed: { type: 'string' },
  'reset-interval': { type: 'string' },
  hidden: { type: 'string' },
  embed: { type: 'string' },
  epochs: { type: 'string' },
  batch: { type: 'string' },
  lr: { type: 'string' },
  entropy: { type: 'string' },
  'early-stop': { type: 'string' },
  label: { type: 'string' },
  'out-dir': { type: 'string' },
  'log-every': { type: 'string' },
  quiet: { type: 'boolean' },
} as const;

async function cmdTrain(args: string[], defaultReset: number): Promise<number> {
  const { values, positionals } = parseArgs({ args, options: TRAIN_OPTIONS, allowPositionals: true });
  if (positionals.length) throw new UsageError(`unexpected argument ${JSON.stringify(positionals[0])}`);
  const space = resolveSpace(values.config, values.preset);
  let cfg;
  try {
    cfg = agentConfig(space, {
      epsilon: floatOpt(values.epsilon, 'epsilon', 0),
      seed: intOpt(values.seed, 'seed', 0),
      resetInterval: intOpt(values['reset-interval'], 'reset-interval', defaultReset),
      hiddenSize: intOpt(values.hidden, 'hidden', 500),
      embedSize: intOpt(values.embed, 'embed', 32),
      maxEpochs: intOpt(values.epochs, 'epochs', 1000),
      batchSize: intOpt(values.batch, 'batch', 512),
      learningRate: floatOpt(values.lr, 'lr', 1e-3),
      entropyCoef: floatOpt(values.entropy, 'entropy', 0.1),
    });
  } catch (err) {
    throw new UsageError((err as Error).message);
  }
  const opts: TrainOptions = { logEvery: intOpt(values['log-every'], 'log-every', 1) };
  if (values['early-stop'] !== undefined) {
    opts.earlyStopAcc = floatOpt(values['early-stop'], 'early-stop', 0);
  }
  if (!values.quiet) {
    opts.onEpoch = (s) => {
      if (s.epoch % 25 === 0) {
        process.stderr.write(
          `epoch ${s.epoch} acc=${s.accuracy.toFixed(3)} reward=${s.reward.toFixed(3)}`
          + ` violations=${s.violationRate.toFixed(3)}\n`);
      }
    };
  }
  const outDir = values['out-dir'] ?? '.';
  fs.mkdirSync(outDir, { recursive: true });
  const stem = path.join(outDir, `${values.label ?? 'run'}_s${cfg.seed}`);

  const result = await trainGame(cfg, opts);
  writeCorpus(result.corpus, space, stem + '.tsv');
  writeTrainLog(result, stem + '.tsv', stem + '.log.json');
  console.log(
    `${stem}.tsv epochs=${result.epochsRun}`
    + ` accuracy=${result.finalAccuracy.toFixed(4)} success=${result.success}`
    + ` violation_rate=${result.meanViolationRate.toFixed(4)}`
    + (result.resets.length ? ` resets=${result.resets.length}` : ''));
  return 0;
}

async function cmdLearnability(args: string[]): Promise<number> {
  const { values, positionals } = parseArgs({
    args,
    options: {
      preset: { type: 'string' },
      config: { type: 'string' },
      seed: { type: 'string' },
      cap: { type: 'string' },
      hidden: { type: 'string' },
      embed: { type: 'string' },
      batch: { type: 'string' },
      lr: { type: 'string' },
      out: { type: 'string' },
      quiet: { type: 'boolean' },
    },
    allowPositionals: true,
  });
  if (positionals.length !== 1) throw new UsageError('learnability expects exactly one corpus path');
  const corpusPath = positionals[0];
  if (!fs.existsSync(corpusPath)) throw new UsageError(`no such corpus: ${corpusPath}`);
  const space = resolveSpace(values.config, values.preset, corpusPath);
  const pairs = readCorpus(corpusPath);
  const result = await listenerLearnability(pairs, space, {
    seed: intOpt(values.seed, 'seed', 0),
    cap: intOpt(values.cap, 'cap', 100),
    hidden: intOpt(values.hidden, 'hidden', 64),
    embedSize: intOpt(values.embed, 'embed', 32),
    batchSize: intOpt(values.batch, 'batch', 128),
    learningRate: floatOpt(values.lr, 'lr', 2e-3),
    onEpoch: values.quiet ? undefined
      : (epoch, acc) => process.stderr.write(`epoch ${epoch} acc=${acc.toFixed(4)}\n`),
  });
  console.log(`epochs_to_99=${result.reachedCap ? `${result.cap}+` : result.epochs}`);
  if (values.out) {
    fs.writeFileSync(values.out, JSON.stringify(result, null, 2) + '\n', 'utf-8');
  }
  return 0;
}

export async function main(argv: string[]): Promise<number> {
  const [cmd, ...rest] = argv;
  if (!cmd || cmd === '--help' || cmd === '-h') {
    process.stdout.write(USAGE);
    return cmd ? 0 : 2;
  }
  try {
    if (cmd === 'train') return await cmdTrain(rest, 0);
    if (cmd === 'iterate') return await cmdTrain(rest, 100);
    if (cmd === 'learnability') return await cmdLearnability(rest);
    throw new UsageError(`unknown command ${JSON.stringify(cmd)}`);
  } catch (err) {
    const code = (err as NodeJS.ErrnoException).code;
    if (err instanceof UsageError || (typeof code === 'string' && code.startsWith('ERR_PARSE_ARGS'))) {
      process.stderr.write(`error: ${(err as Error).message}\n\n${USAGE}`);
      return 2;
    }
    process.stderr.write(`${err instanceof Error ? err.stack : String(err)}\n`);
    return 1;
  }
}

main(process.argv.slice(2)).then((code) => {
  process.exitCode = code;
});
