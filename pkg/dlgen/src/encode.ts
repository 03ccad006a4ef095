/**
 * Log encoding: index vocabularies with reserved start/end tokens, role
 * lookup from the discovered pools, relativized time features, and one
 * n-gram training window per execution step of every trace.
 *
 * A trace of length L yields exactly L windows: window k holds the last n
 * encoded events of [start-padding, e_1..e_k] and predicts event k+1, with
 * a finalization token as the last target. The first event of a trace is
 * not a prediction target; generation seeds it from the empirical
 * first-event table recorded here.
 */

import { readFileSync } from "node:fs";
import type { LogTrace } from "./csv.js";
import { Scaler, ScalingMode, chooseScalingMode, fitScaler, scale } from "./scaling.js";

export const START_TOKEN = 0;

export interface RoleMap {
  /** resource name -> role (pool id) */
  byResource: Map<string, string>;
  roles: string[]; // sorted pool ids
}

export function loadRoles(poolsJsonPath: string): RoleMap {
  const doc = JSON.parse(readFileSync(poolsJsonPath, "utf-8"));
  const byResource = new Map<string, string>();
  const roles: string[] = [];
  for (const pool of doc.pools) {
    roles.push(pool.id);
    for (const resource of pool.resources) byResource.set(resource, pool.id);
  }
  roles.sort();
  return { byResource, roles };
}

export interface FirstEvent {
  act: number;
  role: number;
  durationS: number;
}

export interface EncodedDataset {
  nGram: number;
  /** index 0 is the start token, last index the end token */
  actVocab: string[];
  roleVocab: string[];
  actInputs: number[][];
  roleInputs: number[][];
  durInputs: number[][];
  waitInputs: number[][];
  actTargets: number[];
  roleTargets: number[];
  durTargets: number[];
  waitTargets: number[];
  durScaler: Scaler;
  waitScaler: Scaler;
  firstEvents: FirstEvent[];
  maxTraceLen: number;
  scalingMode: ScalingMode;
}

export function roleOf(resource: string | null, roleMap: RoleMap): string {
  if (resource === null || resource === "") {
    const system = roleMap.byResource.get("SYSTEM") ?? (roleMap.roles.includes("SYSTEM") ? "SYSTEM" : undefined);
    if (system) return system;
    throw new Error("event without resource and no SYSTEM pool in the role map");
  }
  const role = roleMap.byResource.get(resource);
  if (!role) throw new Error(`resource ${resource} is not mapped to any role`);
  return role;
}

export function preprocess(
  traces: LogTrace[],
  roleMap: RoleMap,
  nGram: number,
  scalingMode?: ScalingMode,
): EncodedDataset {
  if (traces.length === 0) throw new Error("cannot encode an empty log");
  if (nGram < 1) throw new Error("n-gram size must be >= 1");

  const activitySet = new Set<string>();
  for (const t of traces) for (const e of t.events) activitySet.add(e.activity);
  const activities = [...activitySet].sort();
  const actVocab = ["<start>", ...activities, "<end>"];
  const roleVocab = ["<start>", ...roleMap.roles, "<end>"];
  const actIndex = new Map(activities.map((a, i) => [a, i + 1]));
  const roleIndex = new Map(roleMap.roles.map((r, i) => [r, i + 1]));
  const endAct = actVocab.length - 1;
  const endRole = roleVocab.length - 1;

  // relativized times in seconds; waits clamp at 0 for overlapping events
  const durations: number[] = [];
  const waits: number[] = [];
  for (const t of traces) {
    let prevEnd: number | null = null;
    for (const e of t.events) {
      durations.push((e.endMs - e.startMs) / 1000);
      waits.push(prevEnd === null ? 0 : Math.max(0, (e.startMs - prevEnd) / 1000));
      prevEnd = e.endMs;
    }
  }
  const mode = scalingMode ?? chooseScalingMode(durations.concat(waits));
  const durScaler = fitScaler(durations, mode);
  const waitScaler = fitScaler(waits, mode);

  const dataset: EncodedDataset = {
    nGram,
    actVocab,
    roleVocab,
    actInputs: [],
    roleInputs: [],
    durInputs: [],
    waitInputs: [],
    actTargets: [],
    roleTargets: [],
    durTargets: [],
    waitTargets: [],
    durScaler,
    waitScaler,
    firstEvents: [],
    maxTraceLen: Math.max(...traces.map((t) => t.events.length)),
    scalingMode: mode,
  };

  for (const trace of traces) {
    const acts: number[] = [];
    const roles: number[] = [];
    const durs: number[] = [];
    const wts: number[] = [];
    let prevEnd: number | null = null;
    for (const e of trace.events) {
      acts.push(actIndex.get(e.activity)!);
      roles.push(roleIndex.get(roleOf(e.resource, roleMap))!);
      durs.push(scale((e.endMs - e.startMs) / 1000, durScaler));
      wts.push(
        scale(prevEnd === null ? 0 : Math.max(0, (e.startMs - prevEnd) / 1000), waitScaler),
      );
      prevEnd = e.endMs;
    }
    dataset.firstEvents.push({
      act: acts[0],
      role: roles[0],
      durationS: (trace.events[0].endMs - trace.events[0].startMs) / 1000,
    });
    const L = trace.events.length;
    for (let k = 1; k <= L; k++) {
      dataset.actInputs.push(window(acts, k, nGram, START_TOKEN));
      dataset.roleInputs.push(window(roles, k, nGram, START_TOKEN));
      dataset.durInputs.push(window(durs, k, nGram, 0));
      dataset.waitInputs.push(window(wts, k, nGram, 0));
      if (k < L) {
        dataset.actTargets.push(acts[k]);
        dataset.roleTargets.push(roles[k]);
        dataset.durTargets.push(durs[k]);
        dataset.waitTargets.push(wts[k]);
      } else {
        dataset.actTargets.push(endAct);
        dataset.roleTargets.push(endRole);
        dataset.durTargets.push(0);
        dataset.waitTargets.push(0);
      }
    }
  }
  return dataset;
}

/** Last n entries of the first k values, left-padded with `pad`. */
function window<T>(values: T[], k: number, n: number, pad: T): T[] {
  const out: T[] = [];
  for (let i = k - n; i < k; i++) out.push(i < 0 ? pad : values[i]);
  return out;
}
