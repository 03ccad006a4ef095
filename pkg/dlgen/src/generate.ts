/**
 * Autoregressive log generation. Each trace starts from an all-start-token
 * window; its first event is drawn from the empirical first-event table
 * (the training windows predict only transitions, so the zero-prefix step
 * has no trained distribution), and every following event is sampled from
 * the model's predicted categorical distributions with the time features
 * inverse-scaled back to seconds. Trace arrival instants replay the fitted
 * inter-arrival distribution handed over from the discovery side.
 */

import * as tf from "@tensorflow/tfjs";
import type { LogTrace } from "./csv.js";
import { START_TOKEN } from "./encode.js";
import { invert } from "./scaling.js";
import { Rng, sampleIndex } from "./rng.js";
import { DistributionSpec, sampleSpec } from "./sampling.js";
import type { TrainedModel } from "./train.js";

export interface GenerateOptions {
  numTraces: number;
  seed: number;
  interarrival: DistributionSpec;
  startInstantMs?: number;
  /** hard stop per trace; defaults to 5x the training maximum */
  maxLength?: number;
}

export interface GeneratedLog {
  traces: LogTrace[];
  cappedTraces: number;
}

interface TraceState {
  caseId: string;
  rng: Rng;
  acts: number[];
  roles: number[];
  durs: number[];
  waits: number[];
  events: LogTrace["events"];
  clockMs: number;
  done: boolean;
}

const ARRIVAL_STREAM = 0;
const TRACE_STREAM_BASE = 1000;

export async function generateLog(
  trained: TrainedModel,
  options: GenerateOptions,
): Promise<GeneratedLog> {
  const { model, meta, config } = trained;
  const n = config.nGram;
  const endAct = meta.actVocab.length - 1;
  const endRole = meta.roleVocab.length - 1;
  const cap = options.maxLength ?? 5 * meta.maxTraceLen;
  const root = new Rng(options.seed);
  const arrivalRng = root.spawn(ARRIVAL_STREAM);
  const width = Math.max(6, String(options.numTraces).length);

  const states: TraceState[] = [];
  let arrival = options.startInstantMs ?? 0;
  for (let i = 0; i < options.numTraces; i++) {
    if (i > 0) arrival += Math.round(sampleSpec(options.interarrival, arrivalRng) * 1000);
    const rng = root.spawn(TRACE_STREAM_BASE + i);
    const state: TraceState = {
      caseId: `G${String(i).padStart(width, "0")}`,
      rng,
      acts: Array(n).fill(START_TOKEN),
      roles: Array(n).fill(START_TOKEN),
      durs: Array(n).fill(0),
      waits: Array(n).fill(0),
      events: [],
      clockMs: arrival,
      done: false,
    };
    seedFirstEvent(state, trained);
    states.push(state);
  }

  let capped = 0;
  for (;;) {
    const active = states.filter((s) => !s.done);
    if (active.length === 0) break;
    const probs = predictBatch(model, active, n);
    for (let row = 0; row < active.length; row++) {
      const state = active[row];
      const actProbs = masked(probs.act, row, probs.actWidth, [START_TOKEN]);
      const act = sampleIndex(actProbs, state.rng);
      if (act === endAct) {
        state.done = true;
        continue;
      }
      const roleProbs = masked(probs.role, row, probs.roleWidth, [START_TOKEN, endRole]);
      const role = sampleIndex(roleProbs, state.rng);
      const durationS = Math.max(0, invert(probs.times[row * 2], meta.durScaler));
      const waitS = Math.max(0, invert(probs.times[row * 2 + 1], meta.waitScaler));
      pushEvent(state, trained, act, role, durationS, waitS);
      if (state.events.length >= cap) {
        state.done = true;
        capped += 1;
      }
    }
  }

  return {
    traces: states.map((s) => ({ caseId: s.caseId, events: s.events })),
    cappedTraces: capped,
  };
}

function seedFirstEvent(state: TraceState, trained: TrainedModel): void {
  const table = trained.meta.firstEvents;
  const pick = table[Math.min(Math.floor(state.rng.uniform() * table.length), table.length - 1)];
  pushEvent(state, trained, pick.act, pick.role, pick.durationS, 0);
}

function pushEvent(
  state: TraceState,
  trained: TrainedModel,
  act: number,
  role: number,
  durationS: number,
  waitS: number,
): void {
  const { meta } = trained;
  const startMs = state.clockMs + Math.round(waitS * 1000);
  const endMs = startMs + Math.round(durationS * 1000);
  state.events.push({
    caseId: state.caseId,
    activity: meta.actVocab[act],
    resource: meta.roleVocab[role],
    startMs,
    endMs,
  });
  state.clockMs = endMs;
  shiftIn(state.acts, act);
  shiftIn(state.roles, role);
  shiftIn(state.durs, scaleFor(durationS, trained, "dur"));
  shiftIn(state.waits, scaleFor(waitS, trained, "wait"));
}

function scaleFor(value: number, trained: TrainedModel, which: "dur" | "wait"): number {
  const scaler = which === "dur" ? trained.meta.durScaler : trained.meta.waitScaler;
  const x = scaler.mode === "log_normalization" ? Math.log1p(value) : value;
  if (scaler.hi === scaler.lo) return 0;
  return Math.min(1, Math.max(0, (x - scaler.lo) / (scaler.hi - scaler.lo)));
}

function shiftIn<T>(window: T[], value: T): void {
  window.shift();
  window.push(value);
}

function predictBatch(model: tf.LayersModel, active: TraceState[], n: number) {
  return tf.tidy(() => {
    const count = active.length;
    const actX = tf.tensor2d(active.map((s) => s.acts), [count, n], "float32");
    const roleX = tf.tensor2d(active.map((s) => s.roles), [count, n], "float32");
    const durX = tf.tensor3d(active.map((s) => s.durs.map((v) => [v])), [count, n, 1]);
    const waitX = tf.tensor3d(active.map((s) => s.waits.map((v) => [v])), [count, n, 1]);
    const [actP, roleP, timesP] = model.predict([actX, roleX, durX, waitX], {
      batchSize: count,
    }) as tf.Tensor[];
    return {
      act: actP.dataSync() as Float32Array,
      actWidth: actP.shape[1] as number,
      role: roleP.dataSync() as Float32Array,
      roleWidth: roleP.shape[1] as number,
      times: timesP.dataSync() as Float32Array,
    };
  });
}

function masked(
  flat: Float32Array,
  row: number,
  width: number,
  zeroed: number[],
): number[] {
  const out = new Array<number>(width);
  for (let j = 0; j < width; j++) out[j] = flat[row * width + j];
  for (const j of zeroed) if (j < width) out[j] = 0;
  return out;
}
