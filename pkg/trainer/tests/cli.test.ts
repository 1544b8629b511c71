import { execFileSync, spawnSync } from 'child_process';
import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { fileURLToPath } from 'url';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { parseConfig } from '../src/config.js';
import { parseCorpus } from '../src/corpus.js';
import { readTrainLog } from '../src/log.js';

const here = path.dirname(fileURLToPath(import.meta.url));
const CLI = path.resolve(here, '../dist/cli.js');
const tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'trainer-cli-'));
afterAll(() => fs.rmSync(tmp, { recursive: true, force: true }));

function run(...args: string[]) {
  const res = spawnSync('node', [CLI, ...args], { encoding: 'utf-8' });
  return { code: res.status, out: res.stdout, err: res.stderr };
}

beforeAll(() => {
  // the binary under test is the built artifact, not the TS sources
  execFileSync('npm', ['run', 'build'], { cwd: path.resolve(here, '..') });
}, 120_000);

describe('usage handling', () => {
  it('prints usage on --help and exits 0', () => {
    const { code, out } = run('--help');
    expect(code).toBe(0);
    expect(out).toContain('train');
    expect(out).toContain('learnability');
  });

  it('exits 2 with usage on no command, unknown command, bad flags', () => {
    expect(run().code).toBe(2);
    expect(run('frobnicate').code).toBe(2);
    expect(run('train', '--seed', 'abc').code).toBe(2);
    expect(run('train', '--preset', 'nope').code).toBe(2);
    expect(run('train', '--no-such-flag').code).toBe(2);
    expect(run('train', 'stray-positional').code).toBe(2);
  });

  it('exits 2 when the learnability corpus is missing', () => {
    const { code, err } = run('learnability', path.join(tmp, 'missing.tsv'));
    expect(code).toBe(2);
    expect(err).toContain('missing.tsv');
  });
});

describe('train command', () => {
  const args = [
    'train', '--preset', 'toy', '--hidden', '16', '--embed', '8',
    '--epochs', '8', '--batch', '16', '--seed', '3',
    '--label', 'smoke', '--out-dir', tmp, '--quiet',
  ];

  it('writes corpus, sidecar config, and JSON log', () => {
    const { code, out } = run(...args);
    expect(code).toBe(0);
    expect(out).toContain('epochs=8');

    const corpus = parseCorpus(fs.readFileSync(path.join(tmp, 'smoke_s3.tsv'), 'utf-8'));
    expect(corpus).toHaveLength(64);
    for (const { meaning, message } of corpus) {
      expect(meaning).toHaveLength(3);
      expect(message).toHaveLength(4);
    }

    const side = parseConfig(fs.readFileSync(path.join(tmp, 'smoke_s3.config'), 'utf-8'));
    expect(side.cardinalities).toEqual([4, 4, 4]);

    const log = readTrainLog(path.join(tmp, 'smoke_s3.log.json'));
    expect(log.epochsRun).toBe(8);
    expect(log.curve).toHaveLength(8);
    expect(log.articulationSamples).toHaveLength(1000);
    expect(log.agent.hiddenSize).toBe(16);
  });

  it('reruns byte-identically for the same seed', () => {
    const first = fs.readFileSync(path.join(tmp, 'smoke_s3.tsv'));
    expect(run(...args).code).toBe(0);
    expect(fs.readFileSync(path.join(tmp, 'smoke_s3.tsv')).equals(first)).toBe(true);
  });

  it('iterate resets the listener every N epochs', () => {
    const { code, out } = run(
      'iterate', '--preset', 'toy', '--hidden', '16', '--embed', '8',
      '--epochs', '7', '--batch', '16', '--reset-interval', '3',
      '--label', 'iter', '--out-dir', tmp, '--quiet');
    expect(code).toBe(0);
    expect(out).toContain('resets=2');
    const log = readTrainLog(path.join(tmp, 'iter_s0.log.json'));
    expect(log.resets).toEqual([3, 6]);
  });
});

describe('learnability command', () => {
  it('scores a trivially learnable corpus and writes the result JSON', () => {
    // one message per class of a single binary attribute
    const lines = ['meaning\tmessage'];
    for (let i = 0; i < 32; i++) {
      const v = i % 2;
      lines.push(`${v}\t${v === 0 ? '0,0' : '3,3'}`);
    }
    const corpusPath = path.join(tmp, 'easy.tsv');
    fs.writeFileSync(corpusPath, lines.join('\n') + '\n', 'utf-8');
    fs.writeFileSync(path.join(tmp, 'easy.config'),
      'cardinalities=2\nvocab_size=4\nmax_len=2\n', 'utf-8');

    const outPath = path.join(tmp, 'easy.json');
    const { code, out } = run(
      'learnability', corpusPath, '--hidden', '16', '--embed', '8',
      '--lr', '0.05', '--cap', '50', '--quiet', '--out', outPath);
    expect(code).toBe(0);
    expect(out).toMatch(/^epochs_to_99=\d+\n$/);
    const result = JSON.parse(fs.readFileSync(outPath, 'utf-8'));
    expect(result.reachedCap).toBe(false);
    expect(result.epochs).toBeLessThanOrEqual(50);
  });

  it('reports the cap sentinel when the corpus is unlearnable in time', () => {
    // two epochs cannot take random 4-char strings past 99%
    const lines = ['meaning\tmessage'];
    let x = 12345;
    const rnd = () => (x = (x * 48271) % 2147483647) % 8;
    for (let a = 0; a < 4; a++) {
      for (let b = 0; b < 4; b++) {
        lines.push(`${a},${b}\t${[0, 0, 0, 0].map(rnd).join(',')}`);
      }
    }
    const corpusPath = path.join(tmp, 'hard.tsv');
    fs.writeFileSync(corpusPath, lines.join('\n') + '\n', 'utf-8');
    fs.writeFileSync(path.join(tmp, 'hard.config'),
      'cardinalities=4,4\nvocab_size=8\nmax_len=4\n', 'utf-8');
    const res = run('learnability', corpusPath, '--hidden', '8', '--embed', '4',
      '--cap', '2', '--quiet');
    expect(res.code).toBe(0);
    expect(res.out).toBe('epochs_to_99=2+\n');
  });
});
