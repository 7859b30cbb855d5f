import init, { Session, beta_evidence } from "./pkg/shelfmem_wasm_demo.js";

const $ = (id) => document.getElementById(id);
let session = null;

function paint(canvas, rgba) {
  const w = session.cols(), h = session.rows();
  canvas.width = w;
  canvas.height = h;
  const ctx = canvas.getContext("2d");
  ctx.putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
}

function redraw() {
  paint($("truth"), session.truth_rgba());
  paint($("belief"), session.belief_rgba());
  paint($("uncert"), session.uncertainty_rgba());
}

function log(line) {
  const el = $("log");
  el.textContent += line + "\n";
  el.scrollTop = el.scrollHeight;
}

function fmt(r) {
  const push = r.vig_push === null ? "   -   " : r.vig_push.toFixed(3).padStart(7);
  return `${String(r.step).padStart(2)} ${r.kind.padEnd(4)} vig view ${r.vig_nbv.toFixed(3).padStart(7)} push ${push}` +
    `  moved ${(100 * r.moved).toFixed(1).padStart(4)} cm  sem ${r.sem_miou.toFixed(3)}  certain ${(100 * r.certainty).toFixed(0)}%` +
    (r.feasible ? "" : "  (infeasible)");
}

function step() {
  const r = JSON.parse(session.step());
  if (r === null) {
    log("episode over");
  } else {
    log(fmt(r));
    redraw();
  }
  const over = r === null || r.done;
  $("step").disabled = over;
  $("run").disabled = over;
  return !over;
}

function newScene() {
  try {
    session = new Session(Number($("seed").value), $("method").value, Number($("budget").value), $("wall").checked);
  } catch (e) {
    $("info").textContent = String(e);
    return;
  }
  $("info").textContent = `${session.object_count()} objects`;
  $("log").textContent = "";
  $("step").disabled = false;
  $("run").disabled = false;
  redraw();
}

function runToEnd() {
  // Yield between steps so the page repaints.
  if (step()) setTimeout(runToEnd, 0);
}

function updateBeta() {
  try {
    const r = JSON.parse(beta_evidence(Number($("hits").value), Number($("misses").value), Number($("weight").value)));
    $("beta").textContent = `Beta(${r.alpha}, ${r.beta}): mean ${r.mean.toFixed(4)}, variance ${r.variance.toExponential(3)}`;
  } catch (e) {
    $("beta").textContent = String(e);
  }
}

await init();
$("new").onclick = newScene;
$("step").onclick = step;
$("run").onclick = runToEnd;
for (const id of ["hits", "misses", "weight"]) $(id).oninput = updateBeta;
updateBeta();
newScene();
