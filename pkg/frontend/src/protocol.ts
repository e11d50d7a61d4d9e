// Application messages inside sealed frames: [u8 app_type][payload],
// little-endian throughout. Encoders cover what a client sends; the
// decoder covers what a server sends. Defense and Shot carry an 8-byte
// tag before the values; production clients send zeros.

import {
  concatBytes,
  decodeUtf8,
  i32le,
  readI32le,
  readI64le,
  readU16le,
  readU32le,
  u32le,
} from "./bytes.js";
import { ProtocolError } from "./errors.js";
import { OutcomeKind, Phase, Player } from "./game.js";
import { HASH_LEN } from "./suite.js";

export const APP_LOGIN = 0x20;
export const APP_CREATE_MATCH = 0x21;
export const APP_JOIN_MATCH = 0x22;
export const APP_DEFENSE = 0x23;
export const APP_SHOT = 0x24;
export const APP_OUTCOME = 0x25;
export const APP_HIGHSCORE_QUERY = 0x26;
export const APP_HIGHSCORE_REPLY = 0x27;
export const APP_ERROR = 0x2f;

export const TAG_LEN = 8;
export const ZERO_TAG = new Uint8Array(TAG_LEN);

export const ERR_PROTOCOL = 1;
export const ERR_EMPTY_IDENTITY = 2;
export const ERR_NOT_LOGGED_IN = 3;
export const ERR_UNKNOWN_MATCH = 4;
export const ERR_MATCH_FULL = 5;
export const ERR_WRONG_PHASE = 6;
export const ERR_WRONG_ROLE = 7;
export const ERR_OUT_OF_RANGE = 8;
export const ERR_OPPONENT_GONE = 9;

const NO_PLAYER = 0xff;

const WIRE_PHASE: Record<number, Phase> = {
  0: "awaitDefense",
  1: "awaitShot",
  2: "finished",
};

function playerFromByte(b: number, what: string): Player {
  if (b !== 0 && b !== 1) throw new ProtocolError(`${what}: bad player byte ${b}`);
  return b;
}

// --- client -> server ---------------------------------------------------------

export function encodeLogin(identity: Uint8Array): Uint8Array {
  return concatBytes(Uint8Array.of(APP_LOGIN), u32le(identity.length), identity);
}

export function encodeCreateMatch(): Uint8Array {
  return Uint8Array.of(APP_CREATE_MATCH);
}

export function encodeJoinMatch(matchId: Uint8Array): Uint8Array {
  if (matchId.length !== 8) throw new ProtocolError("match id must be 8 bytes");
  return concatBytes(Uint8Array.of(APP_JOIN_MATCH), matchId);
}

export function encodeDefense(
  paddleX: number,
  tag: Uint8Array = ZERO_TAG
): Uint8Array {
  if (tag.length !== TAG_LEN) throw new ProtocolError("tag must be 8 bytes");
  return concatBytes(Uint8Array.of(APP_DEFENSE), tag, i32le(paddleX));
}

export function encodeShot(
  angleDdeg: number,
  force: number,
  tag: Uint8Array = ZERO_TAG
): Uint8Array {
  if (tag.length !== TAG_LEN) throw new ProtocolError("tag must be 8 bytes");
  return concatBytes(
    Uint8Array.of(APP_SHOT),
    tag,
    i32le(angleDdeg),
    i32le(force)
  );
}

export function encodeHighScoreQuery(): Uint8Array {
  return Uint8Array.of(APP_HIGHSCORE_QUERY);
}

// --- server -> client ---------------------------------------------------------

export interface Outcome {
  outcomeKind: OutcomeKind;
  points: number;
  finalX: number | null;
  finalY: number | null;
  scoreA: number;
  scoreB: number;
  nextShooter: Player;
  phase: Phase;
  winner: Player | null;
}

export interface HighScoreRow {
  pseudonym: Uint8Array;
  total: number;
}

export type ServerMsg =
  | { kind: "loginOk"; pseudonym: Uint8Array }
  | { kind: "matchCreated"; matchId: Uint8Array }
  | {
      kind: "matchStarted";
      matchId: Uint8Array;
      yourSlot: Player;
      firstShooter: Player;
    }
  | { kind: "defenseCommitted" }
  | { kind: "outcome"; outcome: Outcome }
  | { kind: "highscore"; withheld: boolean; rows: HighScoreRow[] }
  | { kind: "error"; code: number; message: string };

function need(payload: Uint8Array, n: number, what: string): void {
  if (payload.length !== n) {
    throw new ProtocolError(
      `${what}: expected ${n} payload bytes, got ${payload.length}`
    );
  }
}

export function decodeFromServer(data: Uint8Array): ServerMsg {
  if (data.length === 0) throw new ProtocolError("empty app message");
  const appType = data[0] as number;
  const payload = data.subarray(1);
  switch (appType) {
    case APP_LOGIN: {
      need(payload, HASH_LEN, "login reply");
      return { kind: "loginOk", pseudonym: payload.slice() };
    }
    case APP_CREATE_MATCH: {
      need(payload, 8, "match created");
      return { kind: "matchCreated", matchId: payload.slice() };
    }
    case APP_JOIN_MATCH: {
      need(payload, 10, "match started");
      return {
        kind: "matchStarted",
        matchId: payload.slice(0, 8),
        yourSlot: playerFromByte(payload[8] as number, "match started"),
        firstShooter: playerFromByte(payload[9] as number, "match started"),
      };
    }
    case APP_DEFENSE: {
      need(payload, 0, "defense committed");
      return { kind: "defenseCommitted" };
    }
    case APP_OUTCOME: {
      need(payload, 22, "outcome");
      const kindByte = payload[0] as number;
      if (!(kindByte in OutcomeKind)) {
        throw new ProtocolError(`outcome: bad kind ${kindByte}`);
      }
      const hasPos = (payload[2] as number) !== 0;
      const phaseByte = payload[20] as number;
      const phase = WIRE_PHASE[phaseByte];
      if (phase === undefined) {
        throw new ProtocolError(`outcome: bad phase ${phaseByte}`);
      }
      const winnerByte = payload[21] as number;
      return {
        kind: "outcome",
        outcome: {
          outcomeKind: kindByte as OutcomeKind,
          points: payload[1] as number,
          finalX: hasPos ? readI32le(payload, 3) : null,
          finalY: hasPos ? readI32le(payload, 7) : null,
          scoreA: readU32le(payload, 11),
          scoreB: readU32le(payload, 15),
          nextShooter: playerFromByte(payload[19] as number, "outcome"),
          phase,
          winner:
            winnerByte === NO_PLAYER
              ? null
              : playerFromByte(winnerByte, "outcome"),
        },
      };
    }
    case APP_HIGHSCORE_REPLY: {
      if (payload.length < 5) {
        throw new ProtocolError("high score reply: truncated");
      }
      const withheld = (payload[0] as number) !== 0;
      const count = readU32le(payload, 1);
      const rowLen = HASH_LEN + 8;
      if (payload.length !== 5 + count * rowLen) {
        throw new ProtocolError("high score reply: row length mismatch");
      }
      const rows: HighScoreRow[] = [];
      for (let i = 0; i < count; i++) {
        const off = 5 + i * rowLen;
        rows.push({
          pseudonym: payload.slice(off, off + HASH_LEN),
          total: Number(readI64le(payload, off + HASH_LEN)),
        });
      }
      return { kind: "highscore", withheld, rows };
    }
    case APP_ERROR: {
      if (payload.length < 6) {
        throw new ProtocolError("error message: truncated");
      }
      const code = readU16le(payload, 0);
      const n = readU32le(payload, 2);
      if (payload.length !== 6 + n) {
        throw new ProtocolError("error message: length mismatch");
      }
      return { kind: "error", code, message: decodeUtf8(payload.subarray(6)) };
    }
    default:
      throw new ProtocolError(
        `unexpected server app type 0x${appType.toString(16)}`
      );
  }
}
