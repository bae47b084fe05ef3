export interface PairView {
  pair_id: string;
  program: string;
  query: string;
  left: string;
  right: string;
  labeled: number;
  pending: number;
}

export interface Progress {
  labeled: number;
  pending: number;
}

export type Choice = 'left' | 'right' | 'tie';

export type SubmitOutcome =
  | { kind: 'ok'; mu: [number, number] }
  | { kind: 'conflict' }
  | { kind: 'unknown_pair' };
