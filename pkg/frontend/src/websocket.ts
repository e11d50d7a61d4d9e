// Adapter from the standard WebSocket API to the BinarySocket interface.
// The test suite uses an equivalent adapter over the `ws` package, since
// Node 20 has no stable global WebSocket.

import { BinarySocket, SocketFactory } from "./client.js";
import { Unreachable } from "./errors.js";

export function browserSocketFactory(url: string): SocketFactory {
  return () =>
    new Promise<BinarySocket>((resolve, reject) => {
      const WS = (globalThis as { WebSocket?: typeof WebSocket }).WebSocket;
      if (WS === undefined) {
        reject(new Unreachable("no WebSocket implementation in this runtime"));
        return;
      }
      let ws: WebSocket;
      try {
        ws = new WS(url);
      } catch (err) {
        reject(new Unreachable(String(err)));
        return;
      }
      ws.binaryType = "arraybuffer";
      const socket: BinarySocket = {
        send: (data) => ws.send(data as unknown as ArrayBufferView),
        close: () => ws.close(),
        onMessage: null,
        onClose: null,
        onError: null,
      };
      let opened = false;
      ws.onopen = () => {
        opened = true;
        resolve(socket);
      };
      ws.onerror = () => {
        if (!opened) reject(new Unreachable(`cannot reach ${url}`));
        else socket.onError?.(new Error("socket error"));
      };
      ws.onclose = () => {
        if (!opened) reject(new Unreachable(`cannot reach ${url}`));
        else socket.onClose?.();
      };
      ws.onmessage = (ev) => {
        const data = ev.data;
        if (data instanceof ArrayBuffer) {
          socket.onMessage?.(new Uint8Array(data));
        }
      };
    });
}
