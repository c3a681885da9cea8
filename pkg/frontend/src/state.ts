// Control state for the steering loop, the request body it produces, and
// the small amount of client bookkeeping around it (A/B retention of the
// last two generations, single-flight request cancellation).

export type GenerationMode = 'point' | 'trajectory'
export type BaseKind = 'random' | 'inspiration' | 'regularized'

export const SLIDER_STEP = 0.05
export const DEFAULT_ALPHA = -0.25

export type ControlState = {
  V: number
  A: number
  alpha: number
  mode: GenerationMode
  nBars: number
  seed: number
  base: BaseKind
  inspirationId: string | null
  vaStart: [number, number] | null
  vaEnd: [number, number] | null
}

export function defaultControls(): ControlState {
  return {
    V: 0,
    A: 0,
    alpha: DEFAULT_ALPHA,
    mode: 'point',
    nBars: 8,
    seed: 0,
    base: 'random',
    inspirationId: null,
    vaStart: null,
    vaEnd: null
  }
}

export function clampVA(value: number): number {
  return Math.min(1, Math.max(-1, value))
}

// Snap to the slider grid and strip float dust so the value sent is the
// value displayed (e.g. 0.30000000000000004 -> 0.3).
export function snapToStep(value: number, step = SLIDER_STEP): number {
  const snapped = Math.round(clampVA(value) / step) * step
  return Number(snapped.toFixed(2))
}

export function buildGenerateBody(state: ControlState): Record<string, unknown> {
  const body: Record<string, unknown> = {
    mode: state.mode,
    n_bars: state.nBars,
    alpha: state.alpha,
    base: state.base,
    seed: state.seed
  }
  if (state.mode === 'trajectory') {
    const start = state.vaStart ?? [state.V, state.A]
    const end = state.vaEnd ?? [state.V, state.A]
    body.va_start = start
    body.va_end = end
  } else {
    body.V = state.V
    body.A = state.A
  }
  if (state.base === 'inspiration' && state.inspirationId) {
    body.inspiration_id = state.inspirationId
  }
  return body
}

export type Generation = {
  artifactId: string
  modelHash: string
  label: string
  body: Record<string, unknown>
}

// The artist loop is compare-and-adjust: keep the previous result on
// screen next to the current one.
export class GenerationHistory {
  current: Generation | null = null
  previous: Generation | null = null

  push(generation: Generation): void {
    this.previous = this.current
    this.current = generation
  }

  clear(): void {
    this.current = null
    this.previous = null
  }
}

// At most one generation in flight: starting a new request aborts the
// pending one.
export class SingleFlight {
  private controller: AbortController | null = null

  begin(): AbortSignal {
    this.controller?.abort()
    this.controller = new AbortController()
    return this.controller.signal
  }

  finish(): void {
    this.controller = null
  }
}

export function isAbortError(error: unknown): boolean {
  return error instanceof DOMException
    ? error.name === 'AbortError'
    : error instanceof Error && error.name === 'AbortError'
}
