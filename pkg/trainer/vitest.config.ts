import { defineConfig } from 'vitest/config';

// Training tests are long-running and share the wasm backend; run files
// one at a time with generous timeouts.
export default defineConfig({
  test: {
    include: ['tests/**/*.test.ts'],
    testTimeout: 1_800_000,
    hookTimeout: 300_000,
    fileParallelism: false,
    pool: 'forks',
  },
});
