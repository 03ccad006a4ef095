/**
 * Event-log CSV in the logsim schema:
 * case_id,activity,resource,start_timestamp,end_timestamp with ISO-8601
 * millisecond timestamps. Times are epoch milliseconds internally.
 */

import { readFileSync, writeFileSync } from "node:fs";

export interface LogEvent {
  caseId: string;
  activity: string;
  resource: string | null;
  startMs: number;
  endMs: number;
}

export interface LogTrace {
  caseId: string;
  events: LogEvent[];
}

export function parseTimestamp(text: string): number {
  const ms = Date.parse(text.trim());
  if (Number.isNaN(ms)) throw new Error(`bad timestamp: ${text}`);
  return ms;
}

export function formatTimestamp(ms: number): string {
  const iso = new Date(ms).toISOString(); // YYYY-MM-DDTHH:MM:SS.mmmZ
  return iso.slice(0, -1) + "+00:00";
}

function splitCsvLine(line: string): string[] {
  // the schema never quotes commas, but tolerate simple quoted fields
  if (!line.includes('"')) return line.split(",");
  const out: string[] = [];
  let field = "";
  let quoted = false;
  for (const ch of line) {
    if (ch === '"') quoted = !quoted;
    else if (ch === "," && !quoted) {
      out.push(field);
      field = "";
    } else field += ch;
  }
  out.push(field);
  return out;
}

export function readLog(path: string): LogTrace[] {
  const text = readFileSync(path, "utf-8");
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error(`${path}: empty file`);
  const header = splitCsvLine(lines[0]);
  const col = (name: string) => {
    const idx = header.indexOf(name);
    if (idx < 0) throw new Error(`${path}: missing column ${name}`);
    return idx;
  };
  const iCase = col("case_id");
  const iAct = col("activity");
  const iRes = header.indexOf("resource");
  const iStart = col("start_timestamp");
  const iEnd = col("end_timestamp");
  const byCase = new Map<string, LogEvent[]>();
  for (let n = 1; n < lines.length; n++) {
    const cells = splitCsvLine(lines[n]);
    const event: LogEvent = {
      caseId: cells[iCase],
      activity: cells[iAct],
      resource: iRes >= 0 && cells[iRes] !== "" ? cells[iRes] : null,
      startMs: parseTimestamp(cells[iStart]),
      endMs: parseTimestamp(cells[iEnd]),
    };
    if (event.endMs < event.startMs) throw new Error(`${path}:${n + 1}: end before start`);
    let bucket = byCase.get(event.caseId);
    if (!bucket) byCase.set(event.caseId, (bucket = []));
    bucket.push(event);
  }
  const traces: LogTrace[] = [];
  for (const [caseId, events] of byCase) {
    events.sort(
      (a, b) =>
        a.startMs - b.startMs ||
        a.endMs - b.endMs ||
        (a.activity < b.activity ? -1 : a.activity > b.activity ? 1 : 0),
    );
    traces.push({ caseId, events });
  }
  return traces;
}

export function writeLog(traces: LogTrace[], path: string): void {
  const lines = ["case_id,activity,resource,start_timestamp,end_timestamp"];
  for (const trace of traces) {
    for (const e of trace.events) {
      lines.push(
        [
          e.caseId,
          e.activity,
          e.resource ?? "",
          formatTimestamp(e.startMs),
          formatTimestamp(e.endMs),
        ].join(","),
      );
    }
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}
