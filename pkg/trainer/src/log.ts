/** JSON training log: full config (nothing hidden), the per-epoch curve,
 * reset epochs, and the sampled articulation losses used for the
 * cross-component consistency check. */

import * as fs from 'fs';
import { TrainResult } from './game.js';

export function trainLogJson(result: TrainResult, corpusPath: string): string {
  const { space, ...hyper } = result.config;
  return JSON.stringify(
    {
      space,
      agent: hyper,
      corpusPath,
      epochsRun: result.epochsRun,
      epochsTo99: result.epochsTo99,
      success: result.success,
      finalAccuracy: result.finalAccuracy,
      finalPerAttrAcc: result.finalPerAttrAcc,
      meanViolationRate: result.meanViolationRate,
      resets: result.resets,
      curve: result.curve,
      articulationSamples: result.articulationSamples,
    },
    null, 2) + '\n';
}

export function writeTrainLog(result: TrainResult, corpusPath: string, path: string): void {
  fs.writeFileSync(path, trainLogJson(result, corpusPath), 'utf-8');
}

export function readTrainLog(path: string): ReturnType<typeof JSON.parse> {
  return JSON.parse(fs.readFileSync(path, 'utf-8'));
}
