export * from './articulation.js';
export * from './backend.js';
export * from './config.js';
export * from './corpus.js';
export * from './game.js';
export * from './gru.js';
export * from './learnability.js';
export * from './listener.js';
export * from './log.js';
export * from './rng.js';
export * from './sender.js';
