// DOM wiring: renders the badge, table, controls, and high-score panel
// from GameClient state. Everything testable lives in the other modules;
// this file only moves values between the DOM and the client.

import { GameClient, WITHHELD_TEXT } from "./client.js";
import { TrustStoreJson, parseTrustStore } from "./enclave.js";
import {
  DEFENDER_LINE_Y,
  PADDLE_REACH,
  TABLE_LENGTH,
  TABLE_WIDTH,
  ZONE_BANDS,
  clampAngle,
  clampForce,
  clampPaddle,
  playerName,
} from "./game.js";
import { aimUnit, pathPoint, shotOrigin } from "./render.js";
import { browserSocketFactory } from "./websocket.js";

interface ClientConfig {
  url: string;
  trust_store: TrustStoreJson;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

const badge = el<HTMLDivElement>("badge");
const canvas = el<HTMLCanvasElement>("table");
const ctx = canvas.getContext("2d")!;
const identityInput = el<HTMLInputElement>("identity");
const loginBtn = el<HTMLButtonElement>("login");
const createBtn = el<HTMLButtonElement>("create");
const joinInput = el<HTMLInputElement>("join-id");
const joinBtn = el<HTMLButtonElement>("join");
const matchLabel = el<HTMLDivElement>("match-label");
const scoreLabel = el<HTMLDivElement>("score");
const promptLabel = el<HTMLDivElement>("prompt");
const defensePanel = el<HTMLDivElement>("defense-panel");
const paddleSlider = el<HTMLInputElement>("paddle");
const defendBtn = el<HTMLButtonElement>("defend");
const shotPanel = el<HTMLDivElement>("shot-panel");
const angleSlider = el<HTMLInputElement>("angle");
const forceSlider = el<HTMLInputElement>("force");
const shootBtn = el<HTMLButtonElement>("shoot");
const scoresBtn = el<HTMLButtonElement>("highscores");
const scoresPre = el<HTMLPreElement>("highscore-rows");

// table space -> canvas space; the table is drawn shooter-side down
const SCALE = canvas.width / TABLE_WIDTH;
function cx(x: number): number {
  return x * SCALE;
}
function cy(y: number): number {
  return canvas.height - y * (canvas.height / TABLE_LENGTH);
}

let client: GameClient | null = null;
let animationFinal: { x: number; y: number } | null = null;
let animationT = 1;

function drawTable(): void {
  ctx.fillStyle = "#0a3b2e";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#d8d2c4";
  ctx.lineWidth = 2;
  ctx.strokeRect(1, 1, canvas.width - 2, canvas.height - 2);

  for (const [lo, hi, points] of ZONE_BANDS) {
    ctx.fillStyle = points === 3 ? "#195d3c" : points === 2 ? "#14543a" : "#105040";
    ctx.fillRect(0, cy(Math.min(hi, TABLE_LENGTH)), canvas.width, cy(lo) - cy(Math.min(hi, TABLE_LENGTH)));
    ctx.fillStyle = "#d8d2c4";
    ctx.font = "12px sans-serif";
    ctx.fillText(String(points), 6, cy(lo) - 4);
  }

  const v = client?.view;
  // defender line and paddle
  ctx.strokeStyle = "#88aacc";
  ctx.beginPath();
  ctx.moveTo(0, cy(DEFENDER_LINE_Y));
  ctx.lineTo(canvas.width, cy(DEFENDER_LINE_Y));
  ctx.stroke();
  if (client?.canPlaceDefense()) {
    // own pending paddle position; the opponent's stays hidden until the outcome
    const paddleX = clampPaddle(Number(paddleSlider.value));
    ctx.fillStyle = "#e0b040";
    ctx.fillRect(
      cx(paddleX - PADDLE_REACH),
      cy(DEFENDER_LINE_Y) - 3,
      cx(2 * PADDLE_REACH),
      6
    );
  }

  // aim line for the shooter
  if (client?.canShoot()) {
    const origin = shotOrigin();
    const unit = aimUnit(clampAngle(Number(angleSlider.value)));
    const reach = clampForce(Number(forceSlider.value)) * 17;
    ctx.strokeStyle = "#e0e0e0";
    ctx.setLineDash([6, 6]);
    ctx.beginPath();
    ctx.moveTo(cx(origin.x), cy(origin.y));
    ctx.lineTo(cx(origin.x + unit.x * reach), cy(origin.y + unit.y * reach));
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // puck: animate toward the authoritative final position
  const last = v?.lastOutcome;
  if (animationFinal !== null) {
    const p = pathPoint(animationFinal.x, animationFinal.y, animationT);
    ctx.fillStyle = "#f2e3c0";
    ctx.beginPath();
    ctx.arc(cx(p.x), cy(p.y), 8, 0, Math.PI * 2);
    ctx.fill();
  } else if (last === null || last === undefined) {
    const origin = shotOrigin();
    ctx.fillStyle = "#f2e3c0";
    ctx.beginPath();
    ctx.arc(cx(origin.x), cy(origin.y), 8, 0, Math.PI * 2);
    ctx.fill();
  }
}

function describePrompt(): string {
  if (client === null) return "";
  const v = client.view;
  if (v.winner !== null) return `match over: player ${playerName(v.winner)} wins`;
  if (client.canPlaceDefense()) return "your turn: place the paddle";
  if (client.canShoot()) return "your turn: aim and shoot";
  if (v.phase === "awaitDefense") return "opponent is placing a defense";
  if (v.phase === "awaitShot") return "opponent is shooting";
  return v.notice ?? "";
}

function render(): void {
  if (client === null) return;
  badge.textContent = client.badge();
  badge.className = `badge ${client.state}`;
  const v = client.view;
  const attested = client.state === "attested";
  loginBtn.disabled = !attested || v.pseudonymHex !== null;
  createBtn.disabled = !attested || v.pseudonymHex === null || v.matchId !== null;
  joinBtn.disabled = createBtn.disabled;
  matchLabel.textContent =
    v.matchId !== null
      ? `match ${Array.from(v.matchId, (b) => b.toString(16).padStart(2, "0")).join("")}` +
        (v.mySlot !== null ? ` (you are ${playerName(v.mySlot)})` : "")
      : v.notice ?? "no match";
  scoreLabel.textContent = `A ${v.scoreA} : ${v.scoreB} B`;
  promptLabel.textContent = describePrompt();

  defensePanel.style.display = client.canPlaceDefense() ? "block" : "none";
  shotPanel.style.display = client.canShoot() ? "block" : "none";
  defendBtn.disabled = !client.canPlaceDefense();
  shootBtn.disabled = !client.canShoot();
  scoresBtn.disabled = !attested || v.pseudonymHex === null;
  if (v.highscore !== null) {
    scoresPre.textContent = v.highscore.withheld
      ? WITHHELD_TEXT
      : v.highscore.lines.join("\n");
  }
  drawTable();
}

function animateOutcome(): void {
  const last = client?.view.lastOutcome;
  if (!last || last.finalX === null || last.finalY === null) {
    animationFinal = null;
    render();
    return;
  }
  animationFinal = { x: last.finalX, y: last.finalY };
  animationT = 0;
  const start = performance.now();
  const step = (now: number) => {
    animationT = Math.min(1, (now - start) / 900);
    drawTable();
    if (animationT < 1) requestAnimationFrame(step);
  };
  requestAnimationFrame(step);
}

async function main(): Promise<void> {
  const resp = await fetch("./client-config.json");
  const config = (await resp.json()) as ClientConfig;
  const store = parseTrustStore(config.trust_store);
  client = new GameClient(browserSocketFactory(config.url), store);
  let lastOutcomeSeen: unknown = null;
  client.onViewChange = () => {
    const last = client?.view.lastOutcome ?? null;
    if (last !== lastOutcomeSeen) {
      lastOutcomeSeen = last;
      animateOutcome();
    }
    render();
  };
  render();
  await client.connect();
  render();

  // drain pushed messages forever so view state keeps advancing
  void (async () => {
    while (client !== null && client.state === "attested") {
      try {
        await client.next(3_600_000);
      } catch {
        break;
      }
    }
  })();
}

loginBtn.addEventListener("click", () => {
  const name = identityInput.value.trim();
  if (name.length > 0) client?.login(name);
});
createBtn.addEventListener("click", () => client?.createMatch());
joinBtn.addEventListener("click", () => {
  const hex = joinInput.value.trim();
  if (/^[0-9a-fA-F]{16}$/.test(hex)) {
    const id = new Uint8Array(8);
    for (let i = 0; i < 8; i++) id[i] = parseInt(hex.slice(i * 2, i * 2 + 2), 16);
    client?.joinMatch(id);
  }
});
defendBtn.addEventListener("click", () =>
  client?.placeDefense(clampPaddle(Number(paddleSlider.value)))
);
shootBtn.addEventListener("click", () =>
  client?.shoot(
    clampAngle(Number(angleSlider.value)),
    clampForce(Number(forceSlider.value))
  )
);
scoresBtn.addEventListener("click", () => client?.queryHighScores());
for (const slider of [paddleSlider, angleSlider, forceSlider]) {
  slider.addEventListener("input", () => drawTable());
}

main().catch((err) => {
  badge.textContent = `Rejected: ${err instanceof Error ? err.name : String(err)}`;
  badge.className = "badge rejected";
});
