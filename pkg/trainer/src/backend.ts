/** Backend selection: the wasm backend is ~25x faster than the pure-JS cpu
 * backend for these matmul-heavy loops; fall back to cpu when unavailable. */

import * as tf from '@tensorflow/tfjs';
import { setWasmPaths } from '@tensorflow/tfjs-backend-wasm';
import { createRequire } from 'module';
import * as path from 'path';

let pending: Promise<string> | null = null;

export function initBackend(): Promise<string> {
  if (!pending) {
    pending = (async () => {
      try {
        const require = createRequire(import.meta.url);
        const entry = require.resolve('@tensorflow/tfjs-backend-wasm');
        setWasmPaths(path.dirname(entry) + path.sep);
        await tf.setBackend('wasm');
      } catch {
        await tf.setBackend('cpu');
      }
      await tf.ready();
      return tf.getBackend();
    })();
  }
  return pending;
}
