// Integer sine lookups over the shared table: sin(i * 0.1 deg) * 1e6 for
// i in 0..900. The aim line and the authoritative trajectory both come
// from these integers, so what the player sees is what the server scores.

import { SINTAB } from "./sintab.data.js";

export { SINTAB };

export const SIN_SCALE = 1_000_000;

function lookup(index: number): number {
  const v = SINTAB[index];
  if (v === undefined) throw new RangeError(`sintab index ${index} out of range`);
  return v;
}

/** Scaled sine of a signed angle in tenths of a degree, |ddeg| <= 900. */
export function sinScaled(angleDdeg: number): number {
  const mag = Math.abs(angleDdeg);
  const val = lookup(mag);
  return angleDdeg < 0 ? -val : val;
}

/** Scaled cosine via the complement, |ddeg| <= 900. */
export function cosScaled(angleDdeg: number): number {
  return lookup(900 - Math.abs(angleDdeg));
}
