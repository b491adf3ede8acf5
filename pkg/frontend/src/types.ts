// Wire formats of the rating service API.

export type Outcome = "LEFT" | "RIGHT" | "NEUTRAL";

export interface PairPayload {
  comparison_id: string;
  left_url: string;
  right_url: string;
}

export interface StatsPayload {
  total_judgments: number;
  per_operator: Record<string, number>;
  image_counts: { mean: number; min: number; max: number };
  per_image: Record<string, number>;
}
