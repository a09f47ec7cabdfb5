import init, { Explorer } from "./pkg/arcwalk_demo.js";

const $ = (id) => document.getElementById(id);
const palette = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

let explorer = null;
let arcs = 1;

function status(msg) {
  $("status").textContent = msg || "";
}

function heat(t) {
  // white -> dark blue
  const v = Math.round(255 * (1 - t));
  return `rgb(${v},${Math.round(v * 0.9 + 20 * t)},${255 - Math.round(120 * t)})`;
}

function drawHeatmap(data, assignment) {
  const canvas = $("heatmap");
  const ctx = canvas.getContext("2d");
  const n = data.size;
  const cell = canvas.width / n;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  data.rows.forEach((row, i) => {
    row.forEach((v, l) => {
      ctx.fillStyle = heat(Math.min(1, v / data.max));
      ctx.fillRect(l * cell, i * cell, Math.ceil(cell), Math.ceil(cell));
    });
  });
  if (assignment && cell >= 6) {
    assignment.forEach((c, i) => {
      ctx.fillStyle = palette[c % palette.length];
      ctx.fillRect(0, i * cell + cell / 3, cell / 4, cell / 3);
    });
  }
}

function drawCircle(spectrum) {
  const canvas = $("circle");
  const ctx = canvas.getContext("2d");
  const r = canvas.width / 2 - 16;
  const c = canvas.width / 2;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.arc(c, c, r, 0, 2 * Math.PI);
  ctx.stroke();
  const maxIpr = Math.max(...spectrum.eigenvalues.map((e) => e.ipr));
  for (const e of spectrum.eigenvalues) {
    ctx.fillStyle = heat(e.ipr / maxIpr);
    ctx.strokeStyle = "#333";
    ctx.beginPath();
    ctx.arc(c + r * e.re, c - r * e.im, 4, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
  }
  $("degeneracy").textContent =
    `multiplicity at +1: ${spectrum.plus_one}, at −1: ${spectrum.minus_one} ` +
    `(cycle-rank prediction for Grover: ${spectrum.predicted[0]}, ${spectrum.predicted[1]})`;
}

function showCommunities(det) {
  const list = $("communities");
  list.innerHTML = "";
  det.hubs.forEach((hub, c) => {
    const members = det.assignment.map((a, i) => (a === c ? i + 1 : null)).filter((x) => x !== null);
    const li = document.createElement("li");
    li.innerHTML = `<span class="swatch" style="background:${palette[c % palette.length]}"></span>` +
      `hub ${hub}: {${members.join(", ")}}`;
    list.appendChild(li);
  });
  $("marginal").textContent = det.marginal.length
    ? `near the threshold: ${det.marginal.join(", ")}`
    : "no node within 10% of q";
}

function refresh(withSpectrum) {
  if (!explorer) return;
  status("");
  try {
    const steps = Number($("steps").value);
    const qScale = Number($("q").value);
    $("qlabel").textContent = qScale.toFixed(2);
    const det = JSON.parse(explorer.detect(qScale / arcs, steps));
    drawHeatmap(JSON.parse(explorer.heatmap(steps)), det.assignment);
    showCommunities(det);
    if (withSpectrum) drawCircle(JSON.parse(explorer.spectrum()));
  } catch (err) {
    status(err.message || String(err));
  }
}

function adopt(next) {
  if (explorer) explorer.free();
  explorer = next;
  const s = JSON.parse(explorer.summary());
  arcs = s.arcs;
  $("summary").textContent =
    `N = ${s.nodes}, D = ${s.arcs}, b₁ = ${s.betti}, ${s.bipartite ? "bipartite" : "not bipartite"}`;
  refresh(true);
}

function openBuiltin() {
  try {
    adopt(new Explorer($("graph").value, $("coin").value));
  } catch (err) {
    status(err.message || String(err));
  }
}

await init();
$("graph").addEventListener("change", openBuiltin);
$("coin").addEventListener("change", () => {
  try {
    explorer.setCoin($("coin").value);
    refresh(true);
  } catch (err) {
    status(err.message || String(err));
  }
});
$("steps").addEventListener("change", () => refresh(false));
$("q").addEventListener("input", () => refresh(false));
$("load-edges").addEventListener("click", () => {
  try {
    adopt(Explorer.fromEdgeList($("edges").value, $("coin").value));
  } catch (err) {
    status(err.message || String(err));
  }
});
openBuiltin();
