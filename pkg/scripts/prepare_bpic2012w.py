#!/usr/bin/env python3
"""Extract the W subset of the BPIC2012 event log into the canonical CSV.

Keeps only W_ activities (work items performed by human resources), pairs
each lifecycle START event with the next COMPLETE of the same activity in
the same case, and writes case_id,activity,resource,start_timestamp,
end_timestamp rows. Input is the raw XES file (optionally gzipped).

Usage: prepare_bpic2012w.py BPI_Challenge_2012.xes[.gz] out.csv
"""

import csv
import gzip
import sys
from datetime import datetime, timezone
from xml.etree import ElementTree

XES_NS = "{http://www.xes-standard.org/}"


def _attrs(element):
    out = {}
    for child in element:
        key = child.get("key")
        if key:
            out[key] = child.get("value")
    return out


def _parse_ts(value: str) -> datetime:
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    return dt if dt.tzinfo else dt.replace(tzinfo=timezone.utc)


def _fmt(dt: datetime) -> str:
    dt = dt.astimezone(timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}+00:00"


def main(src: str, dst: str) -> int:
    opener = gzip.open if src.endswith(".gz") else open
    rows = 0
    with opener(src, "rb") as fh, open(dst, "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out)
        writer.writerow(["case_id", "activity", "resource", "start_timestamp", "end_timestamp"])
        for _, trace in ElementTree.iterparse(fh, events=("end",)):
            if trace.tag != f"{XES_NS}trace" and trace.tag != "trace":
                continue
            ns = XES_NS if trace.tag.startswith("{") else ""
            case_id = None
            open_starts = {}
            events = []
            for child in trace:
                if child.tag == f"{ns}string" and child.get("key") == "concept:name":
                    case_id = child.get("value")
                if child.tag != f"{ns}event":
                    continue
                a = _attrs(child)
                name = a.get("concept:name", "")
                transition = (a.get("lifecycle:transition") or "").upper()
                if not name.startswith("W_") or "time:timestamp" not in a:
                    continue
                when = _parse_ts(a["time:timestamp"])
                resource = a.get("org:resource", "")
                if transition == "START":
                    open_starts.setdefault(name, []).append((when, resource))
                elif transition == "COMPLETE" and open_starts.get(name):
                    start, start_resource = open_starts[name].pop(0)
                    if when >= start:
                        events.append((start, when, name, resource or start_resource))
            for start, end, name, resource in sorted(events):
                writer.writerow([case_id, name, resource, _fmt(start), _fmt(end)])
                rows += 1
            trace.clear()
    print(f"wrote {rows} events to {dst}")
    return 0


if __name__ == "__main__":
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        sys.exit(1)
    sys.exit(main(sys.argv[1], sys.argv[2]))
