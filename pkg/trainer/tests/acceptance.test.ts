/** Release gates tying the trainer to the measurement toolkit it feeds.
 * Each test prints one `ACCEPTANCE <name>: PASS|FAIL (...)` line; the
 * assertions mirror that verdict. These are full training runs on one core,
 * so the whole file takes over an hour. */

import { execFileSync } from 'child_process';
import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { afterAll, describe, expect, it } from 'vitest';
import { agentConfig, PRESETS, readConfig } from '../src/config.js';
import { readCorpus, writeCorpus } from '../src/corpus.js';
import { trainGame } from '../src/game.js';
import { listenerLearnability } from '../src/learnability.js';
import { readTrainLog, writeTrainLog } from '../src/log.js';

const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'trainer-accept-'));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function verdict(name: string, ok: boolean, detail: string): void {
  process.stdout.write(`\nACCEPTANCE ${name}: ${ok ? 'PASS' : 'FAIL'} (${detail})\n`);
}

function python(code: string, ...args: string[]): string {
  return execFileSync('python3', ['-c', code, ...args], { encoding: 'utf-8' });
}

const fmt = (x: number) => x.toFixed(3);
const mean = (xs: number[]) => xs.reduce((a, b) => a + b, 0) / xs.length;

// ---------------------------------------------------------------------------
// Listener learnability must order languages the way the reference results
// do: concatenative languages learn much faster than fused ones, and a
// random pairing never gets there.

describe('learnability ordering', () => {
  it('concatenative << fused << random across four listener seeds', async () => {
    const langs = ['perfect_concat', 'fusion', 'random'] as const;
    for (const lang of langs) {
      execFileSync('artlang', [
        'gen', '--lang', lang, '--preset', 'default', '--seed', '0',
        '-o', path.join(tmp, `${lang}.tsv`),
      ]);
    }
    const epochs: Record<string, number[]> = {};
    const capped: boolean[] = [];
    for (const lang of langs) {
      const pairs = readCorpus(path.join(tmp, `${lang}.tsv`));
      const space = readConfig(path.join(tmp, `${lang}.config`));
      epochs[lang] = [];
      for (const seed of [0, 1, 2, 3]) {
        const res = await listenerLearnability(pairs, space, { seed });
        epochs[lang].push(res.epochs);
        if (lang === 'random') capped.push(res.reachedCap);
      }
    }
    const ratio = mean(epochs.fusion) / mean(epochs.perfect_concat);
    const allCapped = capped.every(Boolean);
    const ok = ratio >= 3 && allCapped;
    verdict('learnability-ordering', ok,
      `concat ${epochs.perfect_concat.join('/')} fused ${epochs.fusion.join('/')}`
      + ` ratio ${fmt(ratio)} >= 3; random ${epochs.random.map((e, i) =>
        capped[i] ? `${e}+` : `${e}`).join('/')}`);
    expect(ratio).toBeGreaterThanOrEqual(3);
    expect(allCapped).toBe(true);
  }, 4_800_000);
});

// ---------------------------------------------------------------------------
// The articulation penalty must shape exported languages the way the
// reference experiments report: compressed phonotactics (lower BPELen at a
// 96-rule budget) and near-zero parity violations. The trained corpora are
// kept for the interop test below.

const GAME_SEEDS = [0, 1, 2, 3, 4, 5];
const corpusPaths: string[] = [];
let sampleLogPath = '';

describe('articulation pressure', () => {
  it('eps=10 lowers mean BPELen96 vs eps=0 with Welch p < 0.1', async () => {
    const byEps: Record<number, string[]> = { 0: [], 10: [] };
    const vioRates: number[] = [];
    for (const epsilon of [0, 10]) {
      for (const seed of GAME_SEEDS) {
        const cfg = agentConfig(PRESETS.desk, {
          hiddenSize: 64, batchSize: 72, maxEpochs: 1200, epsilon, seed,
        });
        const wantSamples = epsilon === 10 && seed === 0;
        const res = await trainGame(cfg, {
          earlyStopAcc: 0.95, logEvery: 50,
          articulationSampleCount: wantSamples ? 1000 : 0,
        });
        const out = path.join(tmp, `desk_e${epsilon}_s${seed}.tsv`);
        writeCorpus(res.corpus, PRESETS.desk, out);
        byEps[epsilon].push(out);
        corpusPaths.push(out);
        if (epsilon === 10) vioRates.push(res.meanViolationRate);
        if (wantSamples) {
          sampleLogPath = path.join(tmp, 'desk_e10_s0.log.json');
          writeTrainLog(res, out, sampleLogPath);
        }
      }
    }

    const bpelen = (p: string) => Number(python(
      'import sys\n'
      + 'from artlang import read_corpus, bpelen\n'
      + 'print(bpelen(read_corpus(sys.argv[1]), [96])[96])', p));
    const lens0 = byEps[0].map(bpelen);
    const lens10 = byEps[10].map(bpelen);
    const [, p] = python(
      'import sys\n'
      + 'from artlang import compare_means\n'
      + 'i = sys.argv.index("--")\n'
      + 'a = [float(x) for x in sys.argv[1:i]]\n'
      + 'b = [float(x) for x in sys.argv[i + 1:]]\n'
      + 'print(*compare_means(a, b))',
      ...lens0.map(String), '--', ...lens10.map(String),
    ).trim().split(' ').map(Number);

    const drops = mean(lens10) < mean(lens0);
    const vioOk = vioRates.every((v) => v < 0.1);
    const ok = drops && p < 0.1 && vioOk;
    verdict('articulation-pressure', ok,
      `BPELen96 eps0 ${lens0.map(fmt).join('/')} mean ${fmt(mean(lens0))},`
      + ` eps10 ${lens10.map(fmt).join('/')} mean ${fmt(mean(lens10))},`
      + ` Welch p ${p.toExponential(2)};`
      + ` eps10 violation rates ${vioRates.map(fmt).join('/')}`);
    expect(drops).toBe(true);
    expect(p).toBeLessThan(0.1);
    for (const v of vioRates) expect(v).toBeLessThan(0.1);
  }, 3_000_000);
});

// ---------------------------------------------------------------------------
// Everything the trainer exports must be directly consumable by the
// measurement toolkit, and the articulation loss the trainer logs must agree
// with the toolkit's own scoring of the same messages.

describe('interop with the measurement toolkit', () => {
  it('exported corpora load cleanly and logged losses match exactly', () => {
    expect(corpusPaths).toHaveLength(12);
    const loaded = python(
      'import sys\n'
      + 'from artlang import read_corpus\n'
      + 'print(sum(len(read_corpus(p).pairs) > 0 for p in sys.argv[1:]))',
      ...corpusPaths).trim();
    const loadsOk = loaded === String(corpusPaths.length);

    const log = readTrainLog(sampleLogPath);
    const samples: { message: number[]; loss: number }[] = log.articulationSamples;
    const reqPath = path.join(tmp, 'samples.json');
    fs.writeFileSync(reqPath, JSON.stringify({
      epsilon: log.agent.epsilon,
      messages: samples.map((s) => s.message),
    }));
    const scores: number[] = JSON.parse(python(
      'import json, sys\n'
      + 'from artlang import articulation_score\n'
      + 'spec = json.load(open(sys.argv[1]))\n'
      + 'print(json.dumps([articulation_score(m, spec["epsilon"])'
      + ' for m in spec["messages"]]))', reqPath));
    let matches = 0;
    for (let i = 0; i < samples.length; i++) {
      if (scores[i] === samples[i].loss) matches++;
    }
    const matchOk = samples.length === 1000 && matches === samples.length;

    const ok = loadsOk && matchOk;
    verdict('interop', ok,
      `${loaded}/${corpusPaths.length} corpora load;`
      + ` ${matches}/${samples.length} logged articulation losses match`);
    expect(loadsOk).toBe(true);
    expect(matches).toBe(samples.length);
  }, 300_000);
});
