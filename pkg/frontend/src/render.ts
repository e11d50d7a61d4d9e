// Pure geometry for the top-down table view. The canvas layer scales
// these table-space numbers; nothing here touches the DOM.

import { START_X } from "./game.js";
import { SIN_SCALE, cosScaled, sinScaled } from "./sintab.js";

export interface Point {
  x: number;
  y: number;
}

/**
 * Unit direction of a shot, from the same integer table the server uses.
 * x grows across the table, y grows away from the shooter.
 */
export function aimUnit(angleDdeg: number): Point {
  return {
    x: sinScaled(angleDdeg) / SIN_SCALE,
    y: cosScaled(angleDdeg) / SIN_SCALE,
  };
}

/** Where the puck starts, in table space. */
export function shotOrigin(): Point {
  return { x: START_X, y: 0 };
}

/**
 * Position along the straight path from the origin to the authoritative
 * final position, t in [0, 1]. The endpoint comes from the server's
 * outcome, so the animation always lands exactly where the shot scored.
 */
export function pathPoint(finalX: number, finalY: number, t: number): Point {
  const clamped = Math.min(1, Math.max(0, t));
  return {
    x: START_X + (finalX - START_X) * clamped,
    y: finalY * clamped,
  };
}
