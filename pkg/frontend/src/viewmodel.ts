// Derived display state. Pure functions of the latest snapshot: which chart
// kind fits the objective count, which fixed axis range the problem family
// uses, and the timeline rows shown under the chart.

import type { CycleSummary, Snapshot } from "./types.js";

export type ChartKind = "scatter2d" | "scatter3d" | "parallel";

export function chartKind(m: number): ChartKind {
  if (m === 2) return "scatter2d";
  if (m === 3) return "scatter3d";
  return "parallel";
}

/**
 * Fixed per-family axis ranges keep cycles visually comparable: unit box for
 * the sphere-front family, [0, 0.6] for the plane-front family, and a
 * data-driven range otherwise.
 */
export function axisRange(
  problemName: string,
  data: number[][],
): [number, number] {
  const name = problemName.toUpperCase();
  if (name === "DTLZ2" || name === "DTLZ3" || name === "DTLZ4") return [0, 1];
  if (name === "DTLZ1") return [0, 0.6];
  let hi = 1e-9;
  for (const row of data) {
    for (const v of row) {
      if (Number.isFinite(v) && v > hi) hi = v;
    }
  }
  return [0, hi * 1.05];
}

export interface TimelineRow {
  cycle: number;
  zR: string;
  tau: number;
  keepBoundary: boolean;
  generations: number;
  ideal: string;
}

export function timelineRows(history: CycleSummary[]): TimelineRow[] {
  return history.map((rec) => ({
    cycle: rec.cycle,
    zR: `(${rec.roi.z_r.map((v) => trim(v)).join(", ")})`,
    tau: rec.roi.tau,
    keepBoundary: rec.roi.keep_boundary,
    generations: rec.generations,
    ideal: `(${rec.metrics.ideal.map((v) => trim(v)).join(", ")})`,
  }));
}

function trim(v: number): string {
  return Number(v.toPrecision(4)).toString();
}

export interface SessionViewModel {
  sessionId: string;
  status: "idle" | "running";
  progressPercent: number;
  kind: ChartKind;
  range: [number, number];
  objectives: number[][];
  referencePoints: number[][];
  aspiration: number[];
  timeline: TimelineRow[];
  cyclesCompleted: number;
  problemLabel: string;
}

export function toViewModel(snap: Snapshot): SessionViewModel {
  const all = snap.objectives.concat(snap.reference_points, [snap.roi.z_r]);
  return {
    sessionId: snap.session_id,
    status: snap.status,
    progressPercent: Math.round(snap.progress * 100),
    kind: chartKind(snap.problem.m),
    range: axisRange(snap.problem.name, all),
    objectives: snap.objectives,
    referencePoints: snap.reference_points,
    aspiration: snap.roi.z_r,
    timeline: timelineRows(snap.history),
    cyclesCompleted: snap.cycles_completed,
    problemLabel: `${snap.problem.name} (m=${snap.problem.m}, n=${snap.problem.n}, H=${snap.lattice.h})`,
  };
}

/** ZDT1's front curve as a display underlay (pure display geometry). */
export function zdt1FrontCurve(samples = 200): number[][] {
  const pts: number[][] = [];
  for (let i = 0; i <= samples; i++) {
    const t = i / samples;
    pts.push([t * t, 1 - t]);
  }
  return pts;
}
