import type { LogTrace } from "../src/csv.js";
import type { RoleMap } from "../src/encode.js";

/** Deterministic log: each trace walks the given activities in order. */
export function makeLog(
  sequences: { acts: string[]; resources: (string | null)[] }[],
  stepMs = 60_000,
  gapMs = 600_000,
  t0 = 1_700_000_000_000,
): LogTrace[] {
  return sequences.map((seq, i) => {
    let t = t0 + i * gapMs;
    const events = seq.acts.map((activity, j) => {
      const startMs = t;
      const endMs = startMs + stepMs / 2;
      t = endMs + stepMs / 2;
      return {
        caseId: `case${String(i).padStart(3, "0")}`,
        activity,
        resource: seq.resources[j],
        startMs,
        endMs,
      };
    });
    return { caseId: events[0].caseId, events };
  });
}

export function abcLog(n = 100): LogTrace[] {
  return makeLog(
    Array.from({ length: n }, () => ({
      acts: ["A", "B", "C"],
      resources: ["ann", "bob", "cyd"],
    })),
  );
}

export const ABC_ROLES: RoleMap = {
  byResource: new Map([
    ["ann", "P0"],
    ["bob", "P1"],
    ["cyd", "P2"],
  ]),
  roles: ["P0", "P1", "P2"],
};
