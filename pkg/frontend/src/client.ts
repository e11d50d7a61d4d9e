// Connection and match state machine, UI-agnostic. The DOM layer and the
// test suite both drive this class; it owns the no-data-before-attest
// rule: nothing but the ClientHello leaves the socket until the quote
// has verified against the trust store.

import { bytesToHex, encodeUtf8 } from "./bytes.js";
import {
  ClientHandshake,
  HandshakeOptions,
  S2C,
  SessionKeys,
  C2S,
  decodeFrame,
  encodeFrame,
  openFrame,
  seal,
} from "./channel.js";
import { TrustStore } from "./enclave.js";
import { ConnectTimeout, HandshakeAborted, ProtocolError } from "./errors.js";
import {
  Phase,
  Player,
  clampAngle,
  clampForce,
  clampPaddle,
} from "./game.js";
import {
  ERR_OPPONENT_GONE,
  Outcome,
  ServerMsg,
  decodeFromServer,
  encodeCreateMatch,
  encodeDefense,
  encodeHighScoreQuery,
  encodeJoinMatch,
  encodeLogin,
  encodeShot,
} from "./protocol.js";
import {
  MSG_CLIENT_HELLO,
  MSG_FRAME,
  MSG_SERVER_ATTEST,
  decodeWire,
  encodeWire,
} from "./wire.js";

export type UiPhase = "connecting" | "attested" | "rejected";

/** Minimal binary transport; adapters exist for browser and Node sockets. */
export interface BinarySocket {
  send(data: Uint8Array): void;
  close(): void;
  onMessage: ((data: Uint8Array) => void) | null;
  onClose: (() => void) | null;
  onError: ((err: unknown) => void) | null;
}

/** Resolves with an open socket or rejects if the server is unreachable. */
export type SocketFactory = () => Promise<BinarySocket>;

export const WITHHELD_TEXT = "withheld (fewer than k players)";

export interface MatchView {
  pseudonymHex: string | null;
  matchId: Uint8Array | null;
  mySlot: Player | null;
  shooter: Player | null;
  phase: Phase | null;
  scoreA: number;
  scoreB: number;
  winner: Player | null;
  lastOutcome: Outcome | null;
  highscore: { withheld: boolean; lines: string[] } | null;
  notice: string | null;
}

function emptyView(): MatchView {
  return {
    pseudonymHex: null,
    matchId: null,
    mySlot: null,
    shooter: null,
    phase: null,
    scoreA: 0,
    scoreB: 0,
    winner: null,
    lastOutcome: null,
    highscore: null,
    notice: null,
  };
}

interface Waiter {
  resolve: (msg: ServerMsg) => void;
  reject: (err: Error) => void;
  timer: ReturnType<typeof setTimeout>;
}

function errorName(err: unknown): string {
  if (err instanceof HandshakeAborted) return err.reason.name;
  if (err instanceof Error) return err.name;
  return String(err);
}

function withTimeout<T>(
  promise: Promise<T>,
  ms: number,
  what: string
): Promise<T> {
  return new Promise((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new ConnectTimeout(`${what} timed out after ${ms}ms`)),
      ms
    );
    promise.then(
      (v) => {
        clearTimeout(timer);
        resolve(v);
      },
      (e) => {
        clearTimeout(timer);
        reject(e);
      }
    );
  });
}

export interface GameClientOptions {
  handshake?: HandshakeOptions;
  timeoutMs?: number;
}

export class GameClient {
  state: UiPhase = "connecting";
  rejectReason: string | null = null;
  measurementHex: string | null = null;
  /** Sealed application frames sent; stays 0 unless attested. */
  appFramesSent = 0;
  readonly view: MatchView = emptyView();
  onViewChange: (() => void) | null = null;

  private readonly factory: SocketFactory;
  private readonly store: TrustStore;
  private readonly opts: GameClientOptions;
  private socket: BinarySocket | null = null;
  private keys: SessionKeys | null = null;
  private pendingAttest: {
    resolve: (payload: Uint8Array) => void;
    reject: (err: Error) => void;
  } | null = null;
  private queue: ServerMsg[] = [];
  private waiters: Waiter[] = [];
  private rxChain: Promise<void> = Promise.resolve();
  private closed = false;

  constructor(factory: SocketFactory, store: TrustStore, opts: GameClientOptions = {}) {
    this.factory = factory;
    this.store = store;
    this.opts = opts;
  }

  badge(): string {
    if (this.state === "attested") {
      return `Attested: ${(this.measurementHex ?? "").slice(0, 16)}`;
    }
    if (this.state === "rejected") {
      return `Rejected: ${this.rejectReason ?? "unknown"}`;
    }
    return "Connecting";
  }

  /** Runs the handshake; resolves once state is attested or rejected. */
  async connect(): Promise<void> {
    const timeoutMs = this.opts.timeoutMs ?? 5000;
    this.state = "connecting";
    this.changed();
    let socket: BinarySocket;
    try {
      socket = await withTimeout(this.factory(), timeoutMs, "connect");
    } catch (err) {
      this.reject(errorName(err));
      return;
    }
    this.socket = socket;
    socket.onMessage = (data) => {
      this.rxChain = this.rxChain.then(() => this.handleBytes(data));
    };
    socket.onClose = () => this.handleClose();
    socket.onError = () => this.handleClose();

    const hs = await ClientHandshake.create(this.opts.handshake);
    const attestPayload = new Promise<Uint8Array>((resolve, reject) => {
      this.pendingAttest = { resolve, reject };
    });
    socket.send(encodeWire(MSG_CLIENT_HELLO, hs.helloPayload));
    try {
      const payload = await withTimeout(attestPayload, timeoutMs, "attestation");
      this.keys = await hs.finish(payload, this.store);
      this.measurementHex = hs.measurementHex;
      this.state = "attested";
    } catch (err) {
      this.reject(errorName(err));
      socket.close();
    }
    this.pendingAttest = null;
    this.changed();
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }

  // -- turn logic (what the controls key off) --

  get myRole(): "shooter" | "defender" | null {
    const v = this.view;
    if (v.mySlot === null || v.shooter === null || v.phase === "finished") {
      return null;
    }
    return v.mySlot === v.shooter ? "shooter" : "defender";
  }

  canPlaceDefense(): boolean {
    return (
      this.state === "attested" &&
      this.view.phase === "awaitDefense" &&
      this.myRole === "defender"
    );
  }

  canShoot(): boolean {
    return (
      this.state === "attested" &&
      this.view.phase === "awaitShot" &&
      this.myRole === "shooter"
    );
  }

  // -- requests --

  login(identity: string): void {
    this.sendApp(encodeLogin(encodeUtf8(identity)));
  }

  createMatch(): void {
    this.sendApp(encodeCreateMatch());
  }

  joinMatch(matchId: Uint8Array): void {
    this.sendApp(encodeJoinMatch(matchId));
  }

  /** Values are clamped to legal ranges; an invalid value is never sent. */
  placeDefense(paddleX: number): void {
    this.sendApp(encodeDefense(clampPaddle(paddleX)));
  }

  shoot(angleDdeg: number, force: number): void {
    this.sendApp(encodeShot(clampAngle(angleDdeg), clampForce(force)));
  }

  queryHighScores(): void {
    this.sendApp(encodeHighScoreQuery());
  }

  // -- inbound message access for scripted drivers --

  next(timeoutMs = 10000): Promise<ServerMsg> {
    const head = this.queue.shift();
    if (head !== undefined) return Promise.resolve(head);
    if (this.closed) return Promise.reject(new Error("connection closed"));
    return new Promise<ServerMsg>((resolve, reject) => {
      const timer = setTimeout(() => {
        this.waiters = this.waiters.filter((w) => w.timer !== timer);
        reject(new Error(`no server message within ${timeoutMs}ms`));
      }, timeoutMs);
      this.waiters.push({ resolve, reject, timer });
    });
  }

  async expect<K extends ServerMsg["kind"]>(
    kind: K,
    timeoutMs = 10000
  ): Promise<Extract<ServerMsg, { kind: K }>> {
    const msg = await this.next(timeoutMs);
    if (msg.kind !== kind) {
      throw new Error(`expected ${kind}, got ${msg.kind}: ${JSON.stringify(msg)}`);
    }
    return msg as Extract<ServerMsg, { kind: K }>;
  }

  // -- internals --

  private reject(reason: string): void {
    this.state = "rejected";
    this.rejectReason = reason;
    this.changed();
  }

  private changed(): void {
    this.onViewChange?.();
  }

  private sendApp(plaintext: Uint8Array): void {
    if (this.state !== "attested" || this.keys === null || this.socket === null) {
      throw new Error("cannot send: channel is not attested");
    }
    const keys = this.keys;
    const socket = this.socket;
    // seal() is async (WebCrypto); queue on the rx chain so sends cannot
    // interleave and the sequence counter stays strict.
    this.rxChain = this.rxChain.then(async () => {
      try {
        const frame = await seal(keys, C2S, plaintext);
        this.appFramesSent += 1;
        socket.send(encodeWire(MSG_FRAME, encodeFrame(frame)));
      } catch (err) {
        this.failWaiters(err instanceof Error ? err : new Error(String(err)));
      }
    });
  }

  private async handleBytes(data: Uint8Array): Promise<void> {
    let rest = data;
    while (rest.length > 0) {
      let msg;
      try {
        msg = decodeWire(rest);
      } catch (err) {
        this.failWaiters(err instanceof Error ? err : new Error(String(err)));
        this.socket?.close();
        return;
      }
      rest = msg.rest;
      await this.handleWire(msg.msgType, msg.payload);
    }
  }

  private async handleWire(msgType: number, payload: Uint8Array): Promise<void> {
    if (this.pendingAttest !== null) {
      if (msgType !== MSG_SERVER_ATTEST) {
        this.pendingAttest.reject(
          new ProtocolError(`expected attestation, got wire type 0x${msgType.toString(16)}`)
        );
        return;
      }
      // copy: the payload view aliases the socket buffer
      this.pendingAttest.resolve(payload.slice());
      return;
    }
    if (msgType !== MSG_FRAME || this.keys === null) return;
    let plaintext: Uint8Array;
    try {
      plaintext = await openFrame(this.keys, S2C, decodeFrame(payload));
    } catch {
      // tampered, replayed, or out-of-order: the channel is unusable
      this.socket?.close();
      return;
    }
    let decoded: ServerMsg;
    try {
      decoded = decodeFromServer(plaintext);
    } catch {
      this.socket?.close();
      return;
    }
    this.apply(decoded);
    const waiter = this.waiters.shift();
    if (waiter !== undefined) {
      clearTimeout(waiter.timer);
      waiter.resolve(decoded);
    } else {
      this.queue.push(decoded);
    }
  }

  private apply(msg: ServerMsg): void {
    const v = this.view;
    switch (msg.kind) {
      case "loginOk":
        v.pseudonymHex = bytesToHex(msg.pseudonym);
        break;
      case "matchCreated":
        v.matchId = msg.matchId;
        v.notice = "waiting for an opponent";
        break;
      case "matchStarted":
        v.matchId = msg.matchId;
        v.mySlot = msg.yourSlot;
        v.shooter = msg.firstShooter;
        v.phase = "awaitDefense";
        v.scoreA = 0;
        v.scoreB = 0;
        v.winner = null;
        v.lastOutcome = null;
        v.notice = null;
        break;
      case "defenseCommitted":
        v.phase = "awaitShot";
        break;
      case "outcome":
        v.lastOutcome = msg.outcome;
        v.scoreA = msg.outcome.scoreA;
        v.scoreB = msg.outcome.scoreB;
        v.shooter = msg.outcome.nextShooter;
        v.phase = msg.outcome.phase;
        v.winner = msg.outcome.winner;
        break;
      case "highscore":
        v.highscore = {
          withheld: msg.withheld,
          lines: msg.withheld
            ? [WITHHELD_TEXT]
            : msg.rows.map(
                (r, i) =>
                  `${i + 1}. ${bytesToHex(r.pseudonym).slice(0, 12)}  ${r.total}`
              ),
        };
        break;
      case "error":
        if (msg.code === ERR_OPPONENT_GONE) {
          v.matchId = null;
          v.mySlot = null;
          v.shooter = null;
          v.phase = null;
          v.notice = "opponent left the match";
        } else {
          v.notice = `server error ${msg.code}: ${msg.message}`;
        }
        break;
    }
    this.changed();
  }

  private handleClose(): void {
    this.closed = true;
    if (this.pendingAttest !== null) {
      this.pendingAttest.reject(new Error("connection closed"));
      this.pendingAttest = null;
    }
    this.failWaiters(new Error("connection closed"));
  }

  private failWaiters(err: Error): void {
    for (const w of this.waiters) {
      clearTimeout(w.timer);
      w.reject(err);
    }
    this.waiters = [];
  }
}
