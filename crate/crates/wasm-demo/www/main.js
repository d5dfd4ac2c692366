import init, { Demo } from "./pkg/ontorank_wasm_demo.js";

const KIND_COLOR = { Exact: "#2a9d3a", Hyponym: "#d33", Hypernym: "#2b6fd6" };
const BAR_W = 6;
const BAR_H = 26;

const $ = (id) => document.getElementById(id);
const state = { concepts: [], response: null, placed: [], selected: null };
let demo;

// Slider position in [-1, 1] to q: -1 -> -50, 0 -> 1, 1 -> 50, strictly increasing.
export function mapSlider(s) {
  if (s >= 0) return Math.pow(50, s);
  return 1 - (Math.pow(51, -s) - 1) * (51 / 50);
}

function currentQuery() {
  return {
    concepts: state.concepts,
    q: mapSlider(Number($("q-slider").value)),
    threshold: Number($("threshold").value),
    limit: 50,
    measure: $("measure").value,
    weights: null,
  };
}

function runQuery() {
  if (state.concepts.length === 0) {
    state.response = null;
    draw();
    $("summary").textContent = "Add at least one concept.";
    return;
  }
  const out = JSON.parse(demo.query(JSON.stringify(currentQuery())));
  if (out.error) {
    state.response = null;
    $("summary").textContent = `${out.error.code}: ${out.error.message}`;
  } else {
    state.response = out;
    $("summary").textContent = `${out.results.length} documents in ${out.timingMs.toFixed(1)} ms`;
  }
  draw();
}

function renderChips() {
  const box = $("chips");
  box.replaceChildren();
  for (const id of state.concepts) {
    const chip = document.createElement("span");
    chip.className = "chip";
    chip.textContent = id;
    chip.title = "remove";
    chip.onclick = () => {
      state.concepts = state.concepts.filter((c) => c !== id);
      renderChips();
      runQuery();
    };
    box.append(chip);
  }
}

function drawPictogram(ctx, x, y, elementary, scale) {
  const w = BAR_W * scale;
  const h = BAR_H * scale;
  const left = x - (elementary.length * w) / 2;
  ctx.strokeStyle = "#888";
  ctx.lineWidth = 1;
  ctx.strokeRect(left - 1, y - h - 1, elementary.length * w + 2, h + 2);
  elementary.forEach((e, i) => {
    if (e.kind === "None") return;
    const bar = Math.round(e.score * h);
    ctx.fillStyle = KIND_COLOR[e.kind];
    ctx.fillRect(left + i * w, y - bar, w - 1, bar);
  });
}

function draw() {
  const canvas = $("map");
  const ctx = canvas.getContext("2d");
  const cx = canvas.width / 2;
  const cy = canvas.height / 2;
  const R = Math.min(cx, cy) - BAR_H - 8;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.strokeStyle = "#eee";
  for (const r of [0.25, 0.5, 0.75, 1]) {
    ctx.beginPath();
    ctx.arc(cx, cy, r * R, 0, 2 * Math.PI);
    ctx.stroke();
  }
  ctx.fillStyle = "#2b6fd6";
  ctx.fillRect(cx - 6, cy - 6, 12, 12);

  state.placed = [];
  if (!state.response) return;
  // Worst first so the best documents are painted on top.
  for (const r of [...state.response.results].reverse()) {
    const x = cx + r.layout.x * R;
    const y = cy - r.layout.y * R;
    drawPictogram(ctx, x, y + BAR_H / 2, r.elementary, 1);
    state.placed.push({ r, x, y });
  }
}

function hit(ev) {
  const canvas = $("map");
  const rect = canvas.getBoundingClientRect();
  const px = ((ev.clientX - rect.left) * canvas.width) / rect.width;
  const py = ((ev.clientY - rect.top) * canvas.height) / rect.height;
  let best = null;
  for (const p of state.placed) {
    const half = (p.r.elementary.length * BAR_W) / 2 + 3;
    if (Math.abs(px - p.x) <= half && Math.abs(py - p.y) <= BAR_H / 2 + 3) best = p;
  }
  return best;
}

function showLens(ev) {
  const lens = $("lens");
  const p = hit(ev);
  if (!p) {
    lens.hidden = true;
    return;
  }
  const scale = 3;
  const c = document.createElement("canvas");
  c.width = p.r.elementary.length * BAR_W * scale + 8;
  c.height = BAR_H * scale + 6;
  drawPictogram(c.getContext("2d"), c.width / 2, c.height - 3, p.r.elementary, scale);
  const title = document.createElement("div");
  title.textContent = `${p.r.title} · rsv ${p.r.rsv.toFixed(3)}`;
  lens.replaceChildren(title, c);
  const panel = $("map-panel").getBoundingClientRect();
  lens.style.left = `${ev.clientX - panel.left + 14}px`;
  lens.style.top = `${ev.clientY - panel.top + 14}px`;
  lens.hidden = false;
}

function showDetail(ev) {
  const p = hit(ev);
  if (!p) return;
  state.selected = p.r.docId;
  const doc = JSON.parse(demo.document(p.r.docId));
  document.querySelector("#detail h2").textContent = doc.title ?? p.r.docId;
  document.querySelector("#detail .hint").textContent =
    `rank ${p.r.rank}, rsv ${p.r.rsv.toFixed(4)}; annotated with ${
      (doc.annotation ?? []).map((a) => a.label).join(", ")}`;
  const body = document.querySelector("#detail-table tbody");
  body.replaceChildren();
  for (const e of p.r.elementary) {
    const tr = document.createElement("tr");
    for (const v of [e.queryConcept, e.bestDocConcept ?? "–", e.score.toFixed(4), e.kind]) {
      const td = document.createElement("td");
      td.textContent = v;
      tr.append(td);
    }
    tr.style.color = KIND_COLOR[e.kind] ?? "#999";
    body.append(tr);
  }
  $("detail-table").hidden = false;
}

function suggest() {
  const hits = JSON.parse(demo.autocomplete($("concept-input").value, 12));
  const list = $("concept-hits");
  list.replaceChildren(
    ...hits.map((h) => {
      const o = document.createElement("option");
      o.value = h.id;
      o.label = h.label;
      o.textContent = `${h.id} ${h.label}`;
      return o;
    }),
  );
}

function addConcept() {
  const input = $("concept-input");
  let id = input.value.trim();
  if (!id) return;
  // Accept a typed label as well as an id.
  const hits = JSON.parse(demo.autocomplete(id, 1));
  if (hits.length && !hits.some((h) => h.id === id)) id = hits[0].id;
  if (!state.concepts.includes(id)) state.concepts.push(id);
  input.value = "";
  renderChips();
  runQuery();
}

function compare() {
  const out = JSON.parse(demo.similarity($("measure").value, $("sim-a").value.trim(), $("sim-b").value.trim()));
  $("sim-out").textContent = out.error
    ? out.error.message
    : `${out.measure}: raw ${out.raw === null ? "unreachable" : out.raw}\nsimilarity ${out.similarity.toFixed(6)}`;
}

let pending = 0;
function debounced() {
  clearTimeout(pending);
  pending = setTimeout(runQuery, 120);
}

async function main() {
  await init();
  demo = new Demo();
  const h = JSON.parse(demo.health());
  $("status").textContent = `${h.docCount} documents, ${h.conceptCount} concepts`;

  $("concept-input").addEventListener("input", suggest);
  $("concept-input").addEventListener("change", addConcept);
  $("q-slider").addEventListener("input", () => {
    $("q-value").textContent = `q = ${mapSlider(Number($("q-slider").value)).toFixed(2)}`;
    debounced();
  });
  $("threshold").addEventListener("input", () => {
    $("threshold-value").textContent = Number($("threshold").value).toFixed(2);
    debounced();
  });
  $("measure").addEventListener("change", runQuery);
  $("map").addEventListener("mousemove", showLens);
  $("map").addEventListener("mouseleave", () => ($("lens").hidden = true));
  $("map").addEventListener("click", showDetail);
  $("sim-go").addEventListener("click", compare);

  state.concepts = ["GO:0048739", "GO:0007005"];
  renderChips();
  runQuery();
}

main();
