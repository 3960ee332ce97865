import init, { trial, figure, validate } from "./pkg/udn_backhaul_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const SERIES_COLORS = { 100: "#d62728", 150: "#1f77b4", 200: "#2ca02c" };
const GATEWAY_COLORS = ["#9467bd", "#ff7f0e", "#17becf"];

function fail(target, err) {
  target.textContent = String(err);
  target.classList.add("error");
}

// ---- single trial ---------------------------------------------------------

let current = null;
let timer = null;

function drawTrial() {
  const canvas = $("t-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (!current) return;
  const xs = current.hexagon.map((p) => p.x);
  const ys = current.hexagon.map((p) => p.y);
  const span = Math.max(Math.max(...xs) - Math.min(...xs), Math.max(...ys) - Math.min(...ys));
  const scale = (canvas.width - 20) / span;
  const cx = (Math.max(...xs) + Math.min(...xs)) / 2;
  const cy = (Math.max(...ys) + Math.min(...ys)) / 2;
  const px = (p) => [canvas.width / 2 + (p.x - cx) * scale, canvas.height / 2 - (p.y - cy) * scale];

  ctx.strokeStyle = "#999";
  ctx.beginPath();
  current.hexagon.forEach((p, i) => (i ? ctx.lineTo(...px(p)) : ctx.moveTo(...px(p))));
  ctx.closePath();
  ctx.stroke();

  // Routes
  ctx.lineWidth = 1;
  for (const b of current.bs) {
    if (b.next === null) continue;
    const to = b.next < 0 ? current.gateways[b.gateway] : current.bs[b.next];
    ctx.strokeStyle = GATEWAY_COLORS[b.gateway % GATEWAY_COLORS.length] + "66";
    ctx.beginPath();
    ctx.moveTo(...px(b));
    ctx.lineTo(...px(to));
    ctx.stroke();
  }

  // Links active in the selected slot
  const slot = current.slots[num("t-slot")] || [];
  ctx.lineWidth = 3;
  ctx.strokeStyle = "#000";
  for (const l of slot) {
    ctx.beginPath();
    ctx.moveTo(...px(l.from));
    ctx.lineTo(...px(l.to));
    ctx.stroke();
  }
  ctx.lineWidth = 1;

  for (const b of current.bs) {
    ctx.fillStyle = b.hops === null ? "#bbb" : GATEWAY_COLORS[b.gateway % GATEWAY_COLORS.length];
    ctx.beginPath();
    ctx.arc(...px(b), 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.fillStyle = "#000";
  for (const g of current.gateways) {
    const [x, y] = px(g);
    ctx.fillRect(x - 5, y - 5, 10, 10);
  }
}

function showMetrics() {
  const out = $("t-metrics");
  out.classList.remove("error");
  const m = current.metrics;
  const slotCount = current.slots.length;
  const active = slotCount ? current.slots[num("t-slot")].length : 0;
  if (!m) {
    out.textContent = `seed ${current.seed}\nno BS reaches a gateway`;
    return;
  }
  out.textContent = [
    `seed               ${current.seed}`,
    `connected BSs      ${m.connected_count} / ${m.n}`,
    `mean hops k        ${m.k_n.toFixed(3)}`,
    `slots              ${m.slots}`,
    `mean concurrency Y ${m.y_n.toFixed(3)}`,
    `capacity           ${(m.capacity / 1e9).toFixed(4)} Gbps`,
    `avg BS throughput  ${(m.th_avg / 1e6).toFixed(3)} Mbps`,
    `operating power    ${m.p_op.toFixed(3)} W`,
    `energy per BS      ${(m.e_bs / 1e9).toFixed(4)} GJ`,
    `efficiency         ${m.ee_bits_per_joule.toExponential(4)} bit/J`,
    ``,
    `slot ${num("t-slot")} of ${slotCount}: ${active} active link(s)`,
  ].join("\n");
}

function runTrial() {
  stopPlaying();
  try {
    current = JSON.parse(trial(num("t-r"), num("t-n"), num("t-delta"), num("t-index")));
  } catch (e) {
    current = null;
    drawTrial();
    return fail($("t-metrics"), e);
  }
  $("t-slot").max = Math.max(0, current.slots.length - 1);
  $("t-slot").value = 0;
  drawTrial();
  showMetrics();
}

function stopPlaying() {
  clearInterval(timer);
  timer = null;
  $("t-play").textContent = "play slots";
}

function togglePlay() {
  if (timer) return stopPlaying();
  if (!current || !current.slots.length) return;
  $("t-play").textContent = "stop";
  timer = setInterval(() => {
    const s = $("t-slot");
    s.value = (num("t-slot") + 1) % current.slots.length;
    drawTrial();
    showMetrics();
  }, 300);
}

// ---- sweep ---------------------------------------------------------------

function drawFigure(view) {
  const canvas = $("f-canvas");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pad = { l: 70, r: 20, t: 20, b: 45 };
  const rows = view.rows;
  if (!rows.length) {
    ctx.fillText("no connected trials at these settings", pad.l, pad.t + 20);
    return;
  }
  const xMin = Math.min(...rows.map((r) => r.x));
  const xMax = Math.max(...rows.map((r) => r.x));
  const yMax = Math.max(...rows.map((r) => r.y + r.y_ci));
  const yMin = Math.min(0, ...rows.map((r) => r.y - r.y_ci));
  const w = canvas.width - pad.l - pad.r;
  const h = canvas.height - pad.t - pad.b;
  const X = (x) => pad.l + (xMax > xMin ? ((x - xMin) / (xMax - xMin)) * w : w / 2);
  const Y = (y) => pad.t + h - ((y - yMin) / (yMax - yMin || 1)) * h;

  ctx.strokeStyle = "#444";
  ctx.strokeRect(pad.l, pad.t, w, h);
  ctx.fillStyle = "#222";
  ctx.textAlign = "center";
  ctx.fillText(view.x_label, pad.l + w / 2, canvas.height - 10);
  for (let i = 0; i <= 4; i++) {
    const x = xMin + ((xMax - xMin) * i) / 4;
    ctx.fillText(x.toPrecision(3), X(x), pad.t + h + 15);
  }
  ctx.textAlign = "right";
  for (let i = 0; i <= 4; i++) {
    const y = yMin + ((yMax - yMin) * i) / 4;
    ctx.fillText(y.toPrecision(3), pad.l - 5, Y(y) + 4);
  }
  ctx.save();
  ctx.translate(14, pad.t + h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.textAlign = "center";
  ctx.fillText(view.y_label, 0, 0);
  ctx.restore();

  const series = [...new Set(rows.map((r) => r.series_r))];
  series.forEach((s, i) => {
    const color = SERIES_COLORS[s] || "#333";
    const pts = rows.filter((r) => r.series_r === s);
    ctx.strokeStyle = color;
    ctx.fillStyle = color;
    ctx.beginPath();
    pts.forEach((p, j) => (j ? ctx.lineTo(X(p.x), Y(p.y)) : ctx.moveTo(X(p.x), Y(p.y))));
    ctx.stroke();
    for (const p of pts) {
      ctx.beginPath();
      ctx.moveTo(X(p.x), Y(p.y - p.y_ci));
      ctx.lineTo(X(p.x), Y(p.y + p.y_ci));
      ctx.stroke();
      ctx.fillRect(X(p.x) - 2, Y(p.y) - 2, 4, 4);
    }
    ctx.textAlign = "left";
    ctx.fillText(`r = ${s} m`, pad.l + w - 80, pad.t + 15 + 15 * i);
  });
}

function runFigure() {
  const btn = $("f-run");
  btn.disabled = true;
  btn.textContent = "running…";
  // Let the button repaint before the synchronous sweep blocks the page.
  setTimeout(() => {
    try {
      drawFigure(JSON.parse(figure($("f-id").value, num("f-nmax"), num("f-step"), num("f-trials"), num("f-seed"))));
    } catch (e) {
      const ctx = $("f-canvas").getContext("2d");
      ctx.clearRect(0, 0, 9999, 9999);
      ctx.fillStyle = "#b00";
      ctx.fillText(String(e), 20, 30);
    }
    btn.disabled = false;
    btn.textContent = "run sweep";
  }, 10);
}

// ---- validation ----------------------------------------------------------

function runValidate() {
  const out = $("v-out");
  out.classList.remove("error");
  try {
    const v = JSON.parse(validate(num("v-n")));
    out.textContent = v.text;
    if (!v.passed) out.classList.add("error");
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("t-run").onclick = runTrial;
$("t-play").onclick = togglePlay;
$("t-slot").oninput = () => {
  drawTrial();
  if (current) showMetrics();
};
$("f-run").onclick = runFigure;
$("v-run").onclick = runValidate;
runTrial();
