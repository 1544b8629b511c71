/** Seeded PRNG so every run is a pure function of (seed, config). */

export class Rng {
  private state: number;

  constructor(seed: number) {
    // mulberry32; distinct seeds give independent-enough streams for this use
    this.state = seed >>> 0;
  }

  /** Uniform in [0, 1). */
  next(): number {
    let t = (this.state += 0x6d2b79f5);
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  int(bound: number): number {
    return Math.floor(this.next() * bound);
  }

  /** Standard normal via Box-Muller. */
  normal(): number {
    let u = 0;
    while (u === 0) u = this.next();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * this.next());
  }

  /** Draw an index from unnormalized non-negative weights. */
  categorical(weights: Float32Array | number[], offset = 0, length?: number): number {
    const n = length ?? weights.length;
    let total = 0;
    for (let i = 0; i < n; i++) total += weights[offset + i];
    let r = this.next() * total;
    for (let i = 0; i < n; i++) {
      r -= weights[offset + i];
      if (r <= 0) return i;
    }
    return n - 1;
  }

  shuffle(indices: Int32Array): void {
    for (let i = indices.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      const tmp = indices[i];
      indices[i] = indices[j];
      indices[j] = tmp;
    }
  }

  /** Glorot-uniform init for a [fanIn, fanOut] matrix. */
  glorot(fanIn: number, fanOut: number): Float32Array {
    const limit = Math.sqrt(6 / (fanIn + fanOut));
    const out = new Float32Array(fanIn * fanOut);
    for (let i = 0; i < out.length; i++) out[i] = (this.next() * 2 - 1) * limit;
    return out;
  }
}
