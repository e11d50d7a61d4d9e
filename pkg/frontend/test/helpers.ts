// Shared plumbing for the test suite: the Node socket adapter, the shared
// golden fixture, and a harness that spawns the real game server.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import WebSocket from "ws";

import { BinarySocket, SocketFactory } from "../src/client.js";
import { Unreachable } from "../src/errors.js";

const here = dirname(fileURLToPath(import.meta.url));
export const REPO_ROOT = resolve(here, "..", "..");
export const FIXTURES = join(REPO_ROOT, "fixtures");

export function nodeSocketFactory(url: string): SocketFactory {
  return () =>
    new Promise<BinarySocket>((resolvePromise, rejectPromise) => {
      const ws = new WebSocket(url, { perMessageDeflate: false });
      const socket: BinarySocket = {
        send: (data) => ws.send(data),
        close: () => ws.close(),
        onMessage: null,
        onClose: null,
        onError: null,
      };
      let opened = false;
      ws.on("open", () => {
        opened = true;
        resolvePromise(socket);
      });
      ws.on("error", (err) => {
        if (!opened) rejectPromise(new Unreachable(String(err)));
        else socket.onError?.(err);
      });
      ws.on("close", () => {
        if (opened) socket.onClose?.();
      });
      ws.on("message", (data) => {
        const buf = Array.isArray(data)
          ? Buffer.concat(data)
          : Buffer.from(data as Buffer);
        socket.onMessage?.(new Uint8Array(buf));
      });
    });
}

export interface GoldenFixture {
  inputs: {
    nonce: string;
    client_eph_seed: string;
    server_eph_seed: string;
    platform_key_seed: string;
    platform_key_id: string;
    manifest_file: string;
  };
  trust_store: {
    platform_keys: Record<string, string>;
    expected_measurements: string[];
  };
  derived: {
    client_eph_pub: string;
    server_eph_pub: string;
    measurement: string;
    report_data: string;
    transcript_hash: string;
    key_c2s: string;
    key_s2c: string;
  };
  wire: {
    client_hello: string;
    server_attest: string;
    wire_client_hello: string;
    wire_server_attest: string;
  };
  frames: Array<{
    label: string;
    direction: "c2s" | "s2c";
    seq: number;
    plaintext: string;
    frame: string;
    wire: string;
  }>;
}

export function loadGolden(): GoldenFixture {
  return JSON.parse(
    readFileSync(join(FIXTURES, "channel-golden.json"), "utf8")
  ) as GoldenFixture;
}

export interface ServerHandle {
  proc: ChildProcess;
  wsUrl: string;
  dir: string;
  sinkDir: string;
  captureDir: string;
  stop(): Promise<void>;
}

export interface ServerOptions {
  /** Absolute path of the manifest to serve with; defaults to the fixture. */
  manifestPath?: string;
}

export async function spawnServer(opts: ServerOptions = {}): Promise<ServerHandle> {
  const dir = mkdtempSync(join(tmpdir(), "zkpuck-web-"));
  const sinkDir = join(dir, "sinks");
  const captureDir = join(dir, "capture");
  const config = {
    tcp: "127.0.0.1:0",
    ws: "127.0.0.1:0",
    k_min: 5,
    manifest: opts.manifestPath ?? join(FIXTURES, "server-manifest.json"),
    platform_key: join(FIXTURES, "platform-key.json"),
    sink_dir: sinkDir,
    capture_dir: captureDir,
    pseudonym_key:
      "6ff9e3d3c7664c96160b05996c27efad7e07da6e6ab0f54b7605fff8fc5f9878",
  };
  const configPath = join(dir, "server-config.json");
  writeFileSync(configPath, JSON.stringify(config, null, 2));

  const proc = spawn("python3", ["-m", "zkpuck.cli", "serve", "--config", configPath], {
    cwd: REPO_ROOT,
    stdio: ["ignore", "pipe", "pipe"],
  });

  const wsUrl = await new Promise<string>((resolvePromise, rejectPromise) => {
    let out = "";
    let err = "";
    const timer = setTimeout(() => {
      rejectPromise(new Error(`server did not report a ws address:\n${out}\n${err}`));
    }, 15000);
    proc.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const m = out.match(/ws listening on ([\d.]+):(\d+)/);
      if (m) {
        clearTimeout(timer);
        resolvePromise(`ws://${m[1]}:${m[2]}`);
      }
    });
    proc.stderr!.on("data", (chunk: Buffer) => {
      err += chunk.toString();
    });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      rejectPromise(new Error(`server exited with ${code}:\n${out}\n${err}`));
    });
  });

  return {
    proc,
    wsUrl,
    dir,
    sinkDir,
    captureDir,
    stop: () =>
      new Promise<void>((resolvePromise) => {
        if (proc.exitCode !== null) {
          resolvePromise();
          return;
        }
        proc.once("exit", () => resolvePromise());
        proc.kill("SIGTERM");
        setTimeout(() => {
          if (proc.exitCode === null) proc.kill("SIGKILL");
        }, 2000).unref();
      }),
  };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}
