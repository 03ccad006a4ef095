/**
 * Portable counter-based random number generator (splitmix64 stream).
 *
 * Draw i (1-based) of a stream with seed s is mix64(s + i * GOLDEN); child
 * streams derive as mix64(mix64(s ^ GOLDEN) + (tag + 1) * SPLIT). Matches
 * the generator documented by the logsim package so seeds mean the same
 * thing on both sides of the file handoff.
 */

const MASK = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;
const SPLIT = 0xd1b54a32d192ed03n;
const TWO53 = 9007199254740992; // 2**53

export function mix64(z: bigint): bigint {
  z &= MASK;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK;
  return z ^ (z >> 31n);
}

export class Rng {
  private seed: bigint;
  private counter: bigint;

  constructor(seed: bigint | number, counter = 0n) {
    this.seed = BigInt(seed) & MASK;
    this.counter = counter;
  }

  nextU64(): bigint {
    this.counter += 1n;
    return mix64((this.seed + this.counter * GOLDEN) & MASK);
  }

  /** Uniform double in [0, 1) with 53 random bits. */
  uniform(): number {
    return Number(this.nextU64() >> 11n) / TWO53;
  }

  /** Standard normal via Box-Muller; consumes exactly two draws. */
  normal(): number {
    const u1 = 1.0 - this.uniform();
    const u2 = this.uniform();
    return Math.sqrt(-2.0 * Math.log(u1)) * Math.cos(2.0 * Math.PI * u2);
  }

  spawn(tag: number): Rng {
    const childSeed = mix64((mix64(this.seed ^ GOLDEN) + BigInt(tag + 1) * SPLIT) & MASK);
    return new Rng(childSeed);
  }
}

/** Sample an index from a categorical distribution given by weights. */
export function sampleIndex(weights: ArrayLike<number>, rng: Rng): number {
  let total = 0;
  for (let i = 0; i < weights.length; i++) total += weights[i];
  let u = rng.uniform() * total;
  for (let i = 0; i < weights.length; i++) {
    u -= weights[i];
    if (u < 0) return i;
  }
  return weights.length - 1;
}
