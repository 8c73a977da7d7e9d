import init, { FundusDemo, roc_explorer, box_overlap } from "./pkg/discloc_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function bindOutputs() {
  for (const input of document.querySelectorAll("input[type=range]")) {
    const out = input.nextElementSibling;
    const show = () => { out.textContent = input.value; };
    input.addEventListener("input", show);
    show();
  }
}

function fmt(x, digits = 4) {
  return x === null || x === undefined ? "n/a" : Number(x).toFixed(digits);
}

// fundus

let demo = null;
let demoKey = "";

function strokeBox(ctx, b, color) {
  ctx.strokeStyle = color;
  ctx.lineWidth = 2;
  ctx.strokeRect(b.x + 1, b.y + 1, b.w - 2, b.h - 2);
}

function runFundus() {
  const key = [num("seed"), num("size"), $("fringe").checked, $("spots").checked].join();
  if (key !== demoKey) {
    if (demo) demo.free();
    demo = new FundusDemo(num("seed"), num("size"), $("fringe").checked, $("spots").checked);
    demoKey = key;
  }
  const canvas = $("fundus");
  const ctx = canvas.getContext("2d");
  canvas.width = demo.width();
  canvas.height = demo.height();

  let res;
  try {
    res = JSON.parse(demo.localize($("channel").value, num("margin"), num("pct"),
      num("erode"), num("dilate"), num("minarea"), num("expand")));
  } catch (err) {
    $("fundus-out").textContent = "invalid parameters: " + err;
    return;
  }
  const stage = $("stage").value;
  const pixels = stage ? demo.stage_rgba(stage) : demo.rgba();
  ctx.putImageData(new ImageData(new Uint8ClampedArray(pixels), demo.width(), demo.height()), 0, 0);

  strokeBox(ctx, res.truth, "#0f0");
  const lines = [];
  if (res.ok) {
    strokeBox(ctx, res.box, "#f0f");
    ctx.strokeStyle = "#0af";
    ctx.beginPath();
    ctx.arc(res.retina.cx, res.retina.cy, res.retina.r, 0, 2 * Math.PI);
    ctx.stroke();
    lines.push(`IOU        ${fmt(res.iou)}`, `coverage   ${fmt(res.coverage)}`,
      `level      ${fmt(res.level, 2)}`, `candidates ${res.candidates}`);
  } else {
    lines.push(`failed: ${res.error}`);
  }
  lines.push("", "foreground pixels:");
  for (const s of res.stages) {
    if (s.foreground !== null) lines.push(`  ${s.name.padEnd(8)} ${s.foreground}`);
  }
  $("fundus-out").textContent = lines.join("\n");
}

// ROC

function runRoc() {
  let res;
  try {
    res = JSON.parse(roc_explorer(num("npos"), num("nneg"), num("sep"), num("levels"), num("tspec"), num("rocseed")));
  } catch (err) {
    $("roc-out").textContent = String(err);
    return;
  }
  const c = $("roc");
  const ctx = c.getContext("2d");
  const pad = 30;
  const size = c.width - 2 * pad;
  const px = (x) => pad + x * size;
  const py = (y) => c.height - pad - y * size;
  ctx.clearRect(0, 0, c.width, c.height);
  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(pad, pad, size, size);
  ctx.setLineDash([4, 4]);
  ctx.beginPath(); ctx.moveTo(px(0), py(0)); ctx.lineTo(px(1), py(1)); ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "rgba(40, 120, 220, 0.15)";
  ctx.beginPath();
  ctx.moveTo(px(0), py(0));
  for (const [x, y] of res.points) ctx.lineTo(px(x), py(y));
  ctx.lineTo(px(1), py(0));
  ctx.fill();
  ctx.strokeStyle = "#2878dc";
  ctx.lineWidth = 2;
  ctx.beginPath();
  res.points.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
  ctx.stroke();
  ctx.lineWidth = 1;
  ctx.strokeStyle = "#e33";
  ctx.beginPath(); ctx.moveTo(px(1 - res.target_specificity), py(0)); ctx.lineTo(px(1 - res.target_specificity), py(1)); ctx.stroke();
  const op = res.operating_point;
  if (op) {
    ctx.fillStyle = "#e33";
    ctx.beginPath(); ctx.arc(px(1 - op.specificity), py(op.sensitivity), 4, 0, 2 * Math.PI); ctx.fill();
  }
  ctx.fillStyle = "#555";
  ctx.fillText("1 - specificity", pad + size / 2 - 35, c.height - 8);
  ctx.save(); ctx.translate(12, pad + size / 2 + 25); ctx.rotate(-Math.PI / 2); ctx.fillText("sensitivity", 0, 0); ctx.restore();

  $("roc-out").textContent = [
    `AUC          ${fmt(res.auc)}`,
    `vertices     ${res.points.length}`,
    op ? `sensitivity  ${fmt(100 * op.sensitivity, 2)}% at specificity ${fmt(100 * op.specificity, 2)}%`
       : `specificity ${res.target_specificity} not reachable`,
    op ? `threshold    ${fmt(op.threshold)}` : "",
  ].join("\n");
}

// boxes

const boxes = { pred: { x: 60, y: 80, w: 180, h: 160 }, truth: { x: 120, y: 120, w: 200, h: 180 } };
let drag = null;

function drawBoxes() {
  const c = $("boxes");
  const ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  ctx.fillStyle = "rgba(0, 200, 0, 0.2)";
  ctx.fillRect(boxes.truth.x, boxes.truth.y, boxes.truth.w, boxes.truth.h);
  ctx.fillStyle = "rgba(220, 0, 220, 0.2)";
  ctx.fillRect(boxes.pred.x, boxes.pred.y, boxes.pred.w, boxes.pred.h);
  strokeBox(ctx, boxes.truth, "#0a0");
  strokeBox(ctx, boxes.pred, "#c0c");
  const p = boxes.pred, t = boxes.truth;
  try {
    const r = JSON.parse(box_overlap(p.x, p.y, p.w, p.h, t.x, t.y, t.w, t.h));
    $("boxes-out").textContent = [
      `IOU           ${fmt(r.iou)}`,
      `coverage      ${fmt(r.coverage)}`,
      `intersection  ${r.intersection}`,
      `union         ${r.union}`,
      "",
      `pred  ${JSON.stringify(p)}`,
      `truth ${JSON.stringify(t)}`,
    ].join("\n");
  } catch (err) {
    $("boxes-out").textContent = String(err);
  }
}

function setupBoxes() {
  const c = $("boxes");
  const at = (e) => {
    const r = c.getBoundingClientRect();
    return [Math.round(Math.min(Math.max(e.clientX - r.left, 0), c.width)),
            Math.round(Math.min(Math.max(e.clientY - r.top, 0), c.height))];
  };
  c.addEventListener("pointerdown", (e) => {
    drag = { which: e.shiftKey ? "truth" : "pred", start: at(e) };
    c.setPointerCapture(e.pointerId);
  });
  c.addEventListener("pointermove", (e) => {
    if (!drag) return;
    const [x0, y0] = drag.start;
    const [x1, y1] = at(e);
    const b = { x: Math.min(x0, x1), y: Math.min(y0, y1), w: Math.abs(x1 - x0), h: Math.abs(y1 - y0) };
    if (b.w > 0 && b.h > 0) {
      boxes[drag.which] = b;
      drawBoxes();
    }
  });
  c.addEventListener("pointerup", () => { drag = null; });
  drawBoxes();
}

async function main() {
  await init();
  bindOutputs();
  for (const id of ["seed", "size", "fringe", "spots", "channel", "margin", "pct", "erode", "dilate", "minarea", "expand", "stage"]) {
    $(id).addEventListener("change", runFundus);
  }
  for (const id of ["npos", "nneg", "sep", "levels", "tspec", "rocseed"]) {
    $(id).addEventListener("input", runRoc);
  }
  runFundus();
  runRoc();
  setupBoxes();
}

main();
