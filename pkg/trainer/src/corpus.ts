/** Corpus TSV io in the exact format the measurement toolkit reads:
 * header "meaning\tmessage", then comma-joined ints per column. */

import * as fs from 'fs';
import { SpaceConfig, writeConfig } from './config.js';

export const CORPUS_HEADER = 'meaning\tmessage';

export interface CorpusPair {
  meaning: number[];
  message: number[];
}

export function formatCorpus(pairs: CorpusPair[]): string {
  let text = CORPUS_HEADER + '\n';
  for (const { meaning, message } of pairs) {
    text += meaning.join(',') + '\t' + message.join(',') + '\n';
  }
  return text;
}

/** Writes the TSV and its config sidecar (<stem>.config). */
export function writeCorpus(pairs: CorpusPair[], cfg: SpaceConfig, path: string): void {
  fs.writeFileSync(path, formatCorpus(pairs), 'utf-8');
  writeConfig(cfg, path.replace(/\.[^.]*$/, '') + '.config');
}

export function parseCorpus(text: string): CorpusPair[] {
  const lines = text.split('\n');
  if (lines[0] !== CORPUS_HEADER) {
    throw new Error(`bad corpus header: ${JSON.stringify(lines[0])}`);
  }
  const pairs: CorpusPair[] = [];
  for (let i = 1; i < lines.length; i++) {
    if (!lines[i]) continue;
    const cols = lines[i].split('\t');
    if (cols.length !== 2) throw new Error(`corpus line ${i + 1}: expected 2 columns`);
    const meaning = cols[0].split(',').map((x) => parseInt(x, 10));
    const message = cols[1].split(',').map((x) => parseInt(x, 10));
    if (meaning.some(Number.isNaN) || message.some(Number.isNaN)) {
      throw new Error(`corpus line ${i + 1}: non-integer field`);
    }
    pairs.push({ meaning, message });
  }
  if (pairs.length === 0) throw new Error('corpus has no pairs');
  return pairs;
}

export function readCorpus(path: string): CorpusPair[] {
  return parseCorpus(fs.readFileSync(path, 'utf-8'));
}
