// Payload shapes of the steering service API. The console treats these as
// the single source of truth: it renders what the service sends and never
// recomputes optimization or mapping results locally.

export interface RoiJson {
  z_r: number[];
  tau: number;
  keep_boundary: boolean;
}

export interface CycleSummary {
  cycle: number;
  roi: RoiJson;
  generations: number;
  metrics: {
    ideal: number[];
    f_min: number[];
    f_mean: number[];
    f_max: number[];
  };
}

export interface Snapshot {
  session_id: string;
  status: "idle" | "running";
  progress: number;
  problem: { name: string; m: number; n: number };
  lattice: { h: number };
  seed: number;
  roi: RoiJson;
  pivot: number[];
  reference_points: number[][];
  objectives: number[][];
  ideal: number[];
  generation: number;
  cycles_completed: number;
  history: CycleSummary[];
}

export interface CycleRecord extends CycleSummary {
  initial_decisions: number[][];
  decisions: number[][];
  objectives: number[][];
  reference_points: number[][];
}

export interface ApiError {
  code: string;
  message: string;
  pointer?: string;
}

export interface CreateSessionRequest {
  problem: { name: string; m: number };
  roi: RoiJson;
  lattice: { h: number };
  seed: number;
}

export interface CycleRequest {
  generations: number;
  roi?: RoiJson;
}
