// Wires the steering loop to the DOM: paste a script, inspect scene moods
// on the quadrant plot, tweak sliders, generate, compare the last two
// results, play back.  All numbers displayed are round-tripped from the
// service; this file only moves them between widgets.

import { ApiClient, ApiError, type Pianoroll, type SceneRecord } from './api.js'
import { drawPianoroll } from './pianoroll.js'
import { buildSchedule, playSchedule } from './player.js'
import { drawQuadrantPlot, pixelToVa, sceneAtPixel } from './quadrant.js'
import {
  GenerationHistory,
  SingleFlight,
  buildGenerateBody,
  defaultControls,
  isAbortError,
  snapToStep,
  type Generation
} from './state.js'
import {
  collapsesToPoint,
  drawTrajectory,
  endpointAtPixel,
  endpointsFromScene,
  withEndpoint,
  type TrajectoryEndpoints
} from './trajectory.js'

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id)
  if (!found) {
    throw new Error(`missing element #${id}`)
  }
  return found as T
}

const serviceInput = element<HTMLInputElement>('service-url')
const healthDot = element<HTMLSpanElement>('health-dot')
const errorBanner = element<HTMLDivElement>('error-banner')
const errorText = element<HTMLSpanElement>('error-text')
const scriptInput = element<HTMLTextAreaElement>('script-input')
const analyzeButton = element<HTMLButtonElement>('analyze-button')
const sceneList = element<HTMLDivElement>('scene-list')
const quadrantCanvas = element<HTMLCanvasElement>('quadrant-canvas')
const vSlider = element<HTMLInputElement>('v-slider')
const aSlider = element<HTMLInputElement>('a-slider')
const vValue = element<HTMLSpanElement>('v-value')
const aValue = element<HTMLSpanElement>('a-value')
const modeSelect = element<HTMLSelectElement>('mode-select')
const trajectoryEditor = element<HTMLDivElement>('trajectory-editor')
const trajectoryCanvas = element<HTMLCanvasElement>('trajectory-canvas')
const trajectoryReset = element<HTMLButtonElement>('trajectory-reset')
const barsInput = element<HTMLInputElement>('bars-input')
const seedInput = element<HTMLInputElement>('seed-input')
const alphaInput = element<HTMLInputElement>('alpha-input')
const baseSelect = element<HTMLSelectElement>('base-select')
const inspirationInput = element<HTMLInputElement>('inspiration-input')
const inspirationStatus = element<HTMLSpanElement>('inspiration-status')
const generateButton = element<HTMLButtonElement>('generate-button')
const currentResult = element<HTMLDivElement>('current-result')
const previousResult = element<HTMLDivElement>('previous-result')

let api = new ApiClient(serviceInput.value)
const state = defaultControls()
const history = new GenerationHistory()
const flight = new SingleFlight()
const rollCache = new Map<string, Pianoroll>()

let scenes: SceneRecord[] = []
let selectedScene: number | null = null
let sceneTrajectory: number[][] = []
let endpoints: TrajectoryEndpoints | null = null
let dragging: 'start' | 'end' | null = null

function showError(message: string): void {
  errorText.textContent = message
  errorBanner.classList.remove('hidden')
}

function clearError(): void {
  errorBanner.classList.add('hidden')
}

element<HTMLButtonElement>('error-dismiss').addEventListener('click', clearError)

function reportFailure(error: unknown): void {
  if (isAbortError(error)) {
    return
  }
  if (error instanceof ApiError) {
    showError(`service says ${error.status}: ${error.message}`)
  } else {
    showError(`service unreachable: ${String(error)}`)
  }
}

async function checkHealth(): Promise<void> {
  try {
    const health = await api.health()
    const ready = health.model_loaded && health.lexicon_loaded
    healthDot.className = ready ? 'dot ok' : 'dot warn'
    healthDot.title = `model ${health.model_loaded ? 'loaded' : 'missing'}, lexicon ${
      health.lexicon_loaded ? 'loaded' : 'missing'
    }`
  } catch {
    healthDot.className = 'dot bad'
    healthDot.title = 'service unreachable'
  }
}

serviceInput.addEventListener('change', () => {
  api = new ApiClient(serviceInput.value)
  void checkHealth()
})

function setSliders(v: number, a: number): void {
  state.V = snapToStep(v)
  state.A = snapToStep(a)
  vSlider.value = String(state.V)
  aSlider.value = String(state.A)
  vValue.textContent = state.V.toFixed(2)
  aValue.textContent = state.A.toFixed(2)
}

vSlider.addEventListener('input', () => {
  state.V = snapToStep(Number(vSlider.value))
  vValue.textContent = state.V.toFixed(2)
})

aSlider.addEventListener('input', () => {
  state.A = snapToStep(Number(aSlider.value))
  aValue.textContent = state.A.toFixed(2)
})

function refreshTrajectoryEditor(): void {
  trajectoryEditor.classList.toggle('hidden', state.mode !== 'trajectory')
  if (state.mode === 'trajectory') {
    drawTrajectory(trajectoryCanvas, sceneTrajectory, endpoints)
  }
}

function setEndpoints(next: TrajectoryEndpoints | null): void {
  endpoints = next
  state.vaStart = next ? next.start : null
  state.vaEnd = next ? next.end : null
  refreshTrajectoryEditor()
}

modeSelect.addEventListener('change', () => {
  state.mode = modeSelect.value === 'trajectory' ? 'trajectory' : 'point'
  if (state.mode === 'trajectory' && !endpoints) {
    // No scene trajectory to start from: both handles begin at the sliders.
    setEndpoints({ start: [state.V, state.A], end: [state.V, state.A] })
  } else {
    refreshTrajectoryEditor()
  }
})

trajectoryReset.addEventListener('click', () => {
  setEndpoints(endpointsFromScene(sceneTrajectory))
  if (!endpoints) {
    state.mode = 'point'
    modeSelect.value = 'point'
    refreshTrajectoryEditor()
  }
})

trajectoryCanvas.addEventListener('mousedown', (event) => {
  if (!endpoints) {
    return
  }
  const rect = trajectoryCanvas.getBoundingClientRect()
  dragging = endpointAtPixel(endpoints, event.clientX - rect.left, event.clientY - rect.top)
})

trajectoryCanvas.addEventListener('mousemove', (event) => {
  if (!dragging || !endpoints) {
    return
  }
  const rect = trajectoryCanvas.getBoundingClientRect()
  const va = pixelToVa(event.clientX - rect.left, event.clientY - rect.top)
  if (va) {
    setEndpoints(withEndpoint(endpoints, dragging, va.v, va.a))
  }
})

for (const kind of ['mouseup', 'mouseleave'] as const) {
  trajectoryCanvas.addEventListener(kind, () => {
    dragging = null
  })
}

barsInput.addEventListener('change', () => {
  state.nBars = Math.min(64, Math.max(1, Number(barsInput.value) || 8))
  barsInput.value = String(state.nBars)
})

seedInput.addEventListener('change', () => {
  state.seed = Number(seedInput.value) || 0
})

alphaInput.addEventListener('change', () => {
  state.alpha = Math.min(1, Math.max(-1, Number(alphaInput.value) || 0))
  alphaInput.value = String(state.alpha)
})

baseSelect.addEventListener('change', () => {
  const value = baseSelect.value
  state.base = value === 'inspiration' || value === 'regularized' ? value : 'random'
})

inspirationInput.addEventListener('change', () => {
  const file = inspirationInput.files?.[0]
  if (!file) {
    return
  }
  file
    .arrayBuffer()
    .then((data) => api.uploadInspiration(data))
    .then((id) => {
      state.inspirationId = id
      inspirationStatus.textContent = `uploaded ${id}`
      state.base = 'inspiration'
      baseSelect.value = 'inspiration'
      clearError()
    })
    .catch(reportFailure)
})

function selectScene(scene: SceneRecord): void {
  selectedScene = scene.index
  sceneTrajectory = scene.trajectory
  setSliders(scene.V, scene.A)
  if (collapsesToPoint(sceneTrajectory) && state.mode === 'trajectory') {
    state.mode = 'point'
    modeSelect.value = 'point'
  }
  setEndpoints(endpointsFromScene(sceneTrajectory))
  renderScenes()
}

function renderScenes(): void {
  drawQuadrantPlot(quadrantCanvas, scenes, selectedScene)
  sceneList.replaceChildren()
  for (const scene of scenes) {
    const card = document.createElement('button')
    card.className = 'scene-card' + (scene.index === selectedScene ? ' selected' : '')
    const heading = scene.heading || '(no heading)'
    card.innerHTML =
      `<strong>${scene.index}. ${heading}</strong>` +
      `<span>V ${scene.V.toFixed(2)} · A ${scene.A.toFixed(2)} · Q${scene.quadrant}` +
      (scene.warning ? ' · ⚠ low coverage' : '') +
      '</span>'
    card.addEventListener('click', () => selectScene(scene))
    sceneList.append(card)
  }
}

quadrantCanvas.addEventListener('click', (event) => {
  const rect = quadrantCanvas.getBoundingClientRect()
  const hit = sceneAtPixel(scenes, event.clientX - rect.left, event.clientY - rect.top)
  if (hit) {
    selectScene(hit)
  }
})

analyzeButton.addEventListener('click', () => {
  const text = scriptInput.value
  if (!text.trim()) {
    showError('paste a script first')
    return
  }
  analyzeButton.disabled = true
  api
    .analyzeScript(text)
    .then((analysis) => {
      scenes = analysis.scenes
      selectedScene = null
      sceneTrajectory = []
      setEndpoints(null)
      renderScenes()
      clearError()
    })
    .catch(reportFailure)
    .finally(() => {
      analyzeButton.disabled = false
    })
})

async function renderResult(panel: HTMLDivElement, generation: Generation | null, title: string): Promise<void> {
  panel.replaceChildren()
  if (!generation) {
    panel.innerHTML = `<h3>${title}</h3><p class="hint">nothing yet</p>`
    return
  }
  const header = document.createElement('h3')
  header.textContent = `${title} — ${generation.label}`
  const meta = document.createElement('p')
  meta.className = 'hint'
  meta.textContent = `artifact ${generation.artifactId}`
  const canvas = document.createElement('canvas')
  canvas.className = 'roll'
  const controls = document.createElement('div')
  const play = document.createElement('button')
  play.textContent = '▶ play'
  const download = document.createElement('a')
  download.href = api.midiUrl(generation.artifactId)
  download.textContent = 'download .mid'
  download.setAttribute('download', `${generation.artifactId}.mid`)
  controls.append(play, download)
  panel.append(header, meta, canvas, controls)

  try {
    let roll = rollCache.get(generation.artifactId)
    if (!roll) {
      roll = await api.pianoroll(generation.artifactId)
      rollCache.set(generation.artifactId, roll)
    }
    const ready = roll
    drawPianoroll(canvas, ready)
    play.addEventListener('click', () => {
      const context = new AudioContext()
      playSchedule(context, buildSchedule(ready))
    })
  } catch (error) {
    reportFailure(error)
  }
}

function describe(body: Record<string, unknown>): string {
  if (body.mode === 'trajectory') {
    const start = body.va_start as [number, number]
    const end = body.va_end as [number, number]
    return `(${start[0].toFixed(2)}, ${start[1].toFixed(2)}) → (${end[0].toFixed(2)}, ${end[1].toFixed(2)})`
  }
  return `V ${(body.V as number).toFixed(2)}, A ${(body.A as number).toFixed(2)}`
}

generateButton.addEventListener('click', () => {
  const body = buildGenerateBody(state)
  const signal = flight.begin()
  generateButton.disabled = true
  api
    .generate(body, signal)
    .then((response) => {
      flight.finish()
      const cacheHit = history.current?.artifactId === response.artifact_id
      history.push({
        artifactId: response.artifact_id,
        modelHash: response.model_hash,
        label: describe(body) + (cacheHit ? ' (cache hit)' : ''),
        body
      })
      clearError()
      void renderResult(currentResult, history.current, 'current')
      void renderResult(previousResult, history.previous, 'previous')
    })
    .catch(reportFailure)
    .finally(() => {
      generateButton.disabled = false
    })
})

setSliders(0, 0)
refreshTrajectoryEditor()
void renderResult(currentResult, null, 'current')
void renderResult(previousResult, null, 'previous')
void checkHealth()
