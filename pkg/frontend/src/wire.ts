// Outer transport framing: [u32 LE length][u8 type][payload], where length
// counts the type byte plus the payload. Identical to the server's wire
// module; WebSocket binary messages carry exactly these bytes.

import { concatBytes, readU32le, u32le } from "./bytes.js";
import { ProtocolError } from "./errors.js";

export const MSG_CLIENT_HELLO = 0x01;
export const MSG_SERVER_ATTEST = 0x02;
export const MSG_FRAME = 0x10;

export const MAX_WIRE_LEN = 1 << 22;

export function encodeWire(msgType: number, payload: Uint8Array): Uint8Array {
  return concatBytes(
    u32le(1 + payload.length),
    Uint8Array.of(msgType),
    payload
  );
}

export interface WireMessage {
  msgType: number;
  payload: Uint8Array;
  rest: Uint8Array;
}

export function decodeWire(data: Uint8Array): WireMessage {
  if (data.length < 5) throw new ProtocolError("wire message truncated");
  const length = readU32le(data, 0);
  if (length < 1 || length > MAX_WIRE_LEN) {
    throw new ProtocolError(`implausible wire length ${length}`);
  }
  if (data.length < 4 + length) throw new ProtocolError("wire message truncated");
  return {
    msgType: data[4] as number,
    payload: data.subarray(5, 4 + length),
    rest: data.subarray(4 + length),
  };
}
