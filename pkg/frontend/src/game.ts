// Table geometry and input ranges, mirrored from the server's rules.
// Controls clamp to these bounds so an out-of-range value is never sent.

export const TABLE_LENGTH = 10000;
export const TABLE_WIDTH = 5000;
export const DEFENDER_LINE_Y = 9500;
export const PADDLE_REACH = 400;
export const START_X = 2500;
export const ANGLE_MAX_DDEG = 600;
export const FORCE_MIN = 1;
export const FORCE_MAX = 1000;
export const ZONE_BANDS: ReadonlyArray<readonly [number, number, number]> = [
  [8000, 9000, 1],
  [9000, 9600, 2],
  [9600, 10001, 3],
];
export const WINNING_SCORE = 7;

export type Player = 0 | 1;

export function otherPlayer(p: Player): Player {
  return p === 0 ? 1 : 0;
}

export function playerName(p: Player): string {
  return p === 0 ? "A" : "B";
}

export enum OutcomeKind {
  Blocked = 0,
  Scored = 1,
  OffTable = 2,
  ShortOfZones = 3,
}

export type Phase = "awaitDefense" | "awaitShot" | "finished";

function clampInt(value: number, lo: number, hi: number): number {
  const n = Math.round(value);
  if (Number.isNaN(n)) return lo;
  return Math.min(hi, Math.max(lo, n));
}

export function clampAngle(value: number): number {
  return clampInt(value, -ANGLE_MAX_DDEG, ANGLE_MAX_DDEG);
}

export function clampForce(value: number): number {
  return clampInt(value, FORCE_MIN, FORCE_MAX);
}

export function clampPaddle(value: number): number {
  return clampInt(value, 0, TABLE_WIDTH);
}
