import { describe, expect, it } from "vitest";
import { preprocess, roleOf, START_TOKEN } from "../src/encode.js";
import { ABC_ROLES, abcLog, makeLog } from "./helpers.js";

describe("window extraction", () => {
  it("emits one window per execution step for every n", () => {
    const traces = makeLog([
      { acts: ["A", "B", "C"], resources: ["ann", "bob", "cyd"] },
      { acts: ["A"], resources: ["ann"] },
      { acts: ["A", "B", "C", "A", "B"], resources: ["ann", "bob", "cyd", "ann", "bob"] },
    ]);
    for (const n of [1, 2, 5, 10]) {
      const dataset = preprocess(traces, ABC_ROLES, n);
      const expected = traces.reduce((a, t) => a + t.events.length, 0);
      expect(dataset.actInputs.length).toBe(expected);
      expect(dataset.roleInputs.length).toBe(expected);
      expect(dataset.durInputs.length).toBe(expected);
      expect(dataset.waitInputs.length).toBe(expected);
      expect(dataset.actTargets.length).toBe(expected);
    }
  });

  it("pads the first window of a 3-event trace with 4 start tokens at n=5", () => {
    const traces = makeLog([{ acts: ["A", "B", "C"], resources: ["ann", "bob", "cyd"] }]);
    const dataset = preprocess(traces, ABC_ROLES, 5);
    const first = dataset.actInputs[0];
    expect(first.slice(0, 4)).toEqual([START_TOKEN, START_TOKEN, START_TOKEN, START_TOKEN]);
    expect(first[4]).toBe(dataset.actVocab.indexOf("A"));
  });

  it("targets the next event and ends with the finalization token", () => {
    const traces = makeLog([{ acts: ["A", "B", "C"], resources: ["ann", "bob", "cyd"] }]);
    const dataset = preprocess(traces, ABC_ROLES, 5);
    const act = (label: string) => dataset.actVocab.indexOf(label);
    expect(dataset.actTargets).toEqual([act("B"), act("C"), dataset.actVocab.length - 1]);
    expect(dataset.roleTargets[2]).toBe(dataset.roleVocab.length - 1);
  });

  it("records the empirical first event per trace", () => {
    const dataset = preprocess(abcLog(7), ABC_ROLES, 5);
    expect(dataset.firstEvents.length).toBe(7);
    for (const fe of dataset.firstEvents) {
      expect(dataset.actVocab[fe.act]).toBe("A");
      expect(dataset.roleVocab[fe.role]).toBe("P0");
      expect(fe.durationS).toBe(30);
    }
  });
});

describe("time features", () => {
  it("computes duration and waiting from the timestamps", () => {
    // start 10:00:00, end 10:01:00, predecessor ends 09:59:30
    const base = Date.parse("2024-01-01T09:58:30.000+00:00");
    const traces = [
      {
        caseId: "c",
        events: [
          { caseId: "c", activity: "A", resource: "ann", startMs: base, endMs: base + 60_000 },
          {
            caseId: "c",
            activity: "B",
            resource: "bob",
            startMs: base + 90_000,
            endMs: base + 150_000,
          },
        ],
      },
    ];
    const dataset = preprocess(traces, ABC_ROLES, 3, "normalization");
    // second window carries the second event's features in its last slot
    const durScaled = dataset.durInputs[1][2];
    const waitScaled = dataset.waitInputs[1][2];
    // durations are all 60 s (degenerate range -> 0); waits {0, 30}
    expect(durScaled).toBe(0);
    expect(waitScaled).toBe(1); // 30 s is the max wait
    expect(dataset.waitScaler.hi).toBe(30);
  });

  it("keeps every scaled value in [0, 1]", () => {
    const dataset = preprocess(abcLog(10), ABC_ROLES, 4);
    for (const rows of [dataset.durInputs, dataset.waitInputs]) {
      for (const row of rows) {
        for (const v of row) {
          expect(v).toBeGreaterThanOrEqual(0);
          expect(v).toBeLessThanOrEqual(1);
        }
      }
    }
  });
});

describe("role mapping", () => {
  it("rejects unmapped resources by name", () => {
    const traces = makeLog([{ acts: ["A"], resources: ["ghost"] }]);
    expect(() => preprocess(traces, ABC_ROLES, 3)).toThrow(/ghost/);
  });

  it("routes missing resources to the SYSTEM pool when present", () => {
    const roles = {
      byResource: new Map([["ann", "P0"]]),
      roles: ["P0", "SYSTEM"],
    };
    expect(roleOf(null, roles)).toBe("SYSTEM");
    expect(() => roleOf(null, ABC_ROLES)).toThrow(/SYSTEM/);
  });
});
