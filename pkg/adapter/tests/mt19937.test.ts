import { describe, expect, it } from "vitest";

import { MersenneTwister, shuffledOrder } from "../src/mt19937.js";

// Reference vectors generated with CPython's random.Random: the raw 32-bit
// stream for seed 42, and Fisher-Yates permutations (j = randrange(i + 1))
// matching the engine's frozen shuffle convention.
const UINT32_SEED_42 = [
  2746317213, 478163327, 107420369, 3184935163,
  1181241943, 1051802512, 958682846, 599310825,
];

const PERMUTATIONS: Array<[number, number, number[]]> = [
  [1, 42, [0]],
  [5, 42, [3, 1, 2, 4, 0]],
  [5, 43, [1, 4, 3, 2, 0]],
  [8, 0, [4, 1, 5, 2, 0, 3, 7, 6]],
  [12, 7, [7, 11, 3, 10, 8, 4, 9, 1, 0, 6, 2, 5]],
  [20, 12345, [16, 18, 3, 8, 19, 10, 7, 14, 12, 1, 5, 2, 15, 17, 4, 6, 11, 9, 0, 13]],
  [100, 42, [
    42, 41, 91, 9, 65, 50, 1, 70, 15, 78, 73, 10, 55, 56, 72, 45, 48, 92, 76, 37,
    30, 21, 32, 96, 80, 49, 83, 26, 87, 33, 8, 47, 59, 63, 74, 44, 98, 52, 85, 12,
    36, 23, 39, 40, 18, 66, 61, 60, 7, 34, 99, 46, 2, 51, 16, 38, 58, 68, 22, 62,
    24, 5, 6, 67, 82, 19, 79, 43, 90, 20, 0, 95, 57, 93, 53, 89, 25, 71, 84, 77,
    64, 29, 27, 88, 97, 4, 54, 75, 11, 69, 86, 13, 17, 28, 31, 35, 94, 3, 14, 81,
  ]],
];

describe("MersenneTwister", () => {
  it("reproduces CPython's 32-bit stream for seed 42", () => {
    const rng = new MersenneTwister(42);
    for (const expected of UINT32_SEED_42) {
      expect(rng.genrandUint32()).toBe(expected);
    }
  });

  it("rejects unsafe seeds", () => {
    expect(() => new MersenneTwister(2 ** 53)).toThrow(RangeError);
  });
});

describe("shuffledOrder", () => {
  it.each(PERMUTATIONS)("matches the engine permutation for n=%i seed=%i", (n, seed, expected) => {
    expect(shuffledOrder(n, seed)).toEqual(expected);
  });

  it("is a bijection", () => {
    for (const [n, seed] of [[17, 3], [64, 99], [200, 123456789]]) {
      const perm = shuffledOrder(n, seed);
      expect([...perm].sort((a, b) => a - b)).toEqual(Array.from({ length: n }, (_, i) => i));
    }
  });

  it("rejects n = 0", () => {
    expect(() => shuffledOrder(0, 42)).toThrow(RangeError);
  });
});
