import { describe, expect, it } from 'vitest'

import {
  DEFAULT_ALPHA,
  GenerationHistory,
  SLIDER_STEP,
  SingleFlight,
  buildGenerateBody,
  clampVA,
  defaultControls,
  isAbortError,
  snapToStep
} from '../src/state.js'

describe('slider values', () => {
  it('clamps to [-1, 1]', () => {
    expect(clampVA(1.7)).toBe(1)
    expect(clampVA(-1.01)).toBe(-1)
    expect(clampVA(0.4)).toBe(0.4)
  })

  it('snaps to the 0.05 grid without float dust', () => {
    expect(SLIDER_STEP).toBe(0.05)
    expect(snapToStep(0.07)).toBe(0.05)
    expect(snapToStep(0.675)).toBe(0.7)
    expect(snapToStep(0.1 + 0.2)).toBe(0.3)
    expect(snapToStep(-2)).toBe(-1)
  })

  it('defaults match the service defaults', () => {
    const controls = defaultControls()
    expect(controls.alpha).toBe(DEFAULT_ALPHA)
    expect(controls.alpha).toBe(-0.25)
    expect(controls.mode).toBe('point')
    expect(controls.nBars).toBe(8)
    expect(controls.base).toBe('random')
  })
})

describe('buildGenerateBody', () => {
  it('sends the slider values unchanged in point mode', () => {
    const controls = defaultControls()
    controls.V = 0.3
    controls.A = -0.4
    const body = buildGenerateBody(controls)
    expect(body.V).toBe(0.3)
    expect(body.A).toBe(-0.4)
    expect(body.mode).toBe('point')
    expect(body.va_start).toBeUndefined()
  })

  it('moving the valence slider +0.5 changes only V in the next request', () => {
    const controls = defaultControls()
    controls.V = 0.2
    const before = buildGenerateBody(controls)
    controls.V = snapToStep(controls.V + 0.5)
    const after = buildGenerateBody(controls)
    expect(before.V).toBe(0.2)
    expect(after.V).toBe(0.7)
    expect(after.A).toBe(before.A)
    expect(after.seed).toBe(before.seed)
  })

  it('identical control state yields an identical body', () => {
    const first = defaultControls()
    const second = defaultControls()
    first.V = second.V = 0.55
    first.A = second.A = -0.15
    expect(JSON.stringify(buildGenerateBody(first))).toBe(
      JSON.stringify(buildGenerateBody(second))
    )
  })

  it('trajectory mode sends va_start and va_end', () => {
    const controls = defaultControls()
    controls.mode = 'trajectory'
    controls.vaStart = [-0.5, -0.5]
    controls.vaEnd = [0.5, 0.8]
    const body = buildGenerateBody(controls)
    expect(body.va_start).toEqual([-0.5, -0.5])
    expect(body.va_end).toEqual([0.5, 0.8])
    expect(body.V).toBeUndefined()
  })

  it('trajectory mode without endpoints degenerates to the sliders', () => {
    const controls = defaultControls()
    controls.mode = 'trajectory'
    controls.V = 0.3
    controls.A = 0.1
    const body = buildGenerateBody(controls)
    expect(body.va_start).toEqual([0.3, 0.1])
    expect(body.va_end).toEqual([0.3, 0.1])
  })

  it('includes the inspiration id only when that base is chosen', () => {
    const controls = defaultControls()
    controls.inspirationId = 'abc123'
    expect(buildGenerateBody(controls).inspiration_id).toBeUndefined()
    controls.base = 'inspiration'
    expect(buildGenerateBody(controls).inspiration_id).toBe('abc123')
  })
})

describe('GenerationHistory', () => {
  it('retains exactly the last two generations for A/B', () => {
    const history = new GenerationHistory()
    const make = (id: string) => ({ artifactId: id, modelHash: 'h', label: id, body: {} })
    history.push(make('a'))
    expect(history.current?.artifactId).toBe('a')
    expect(history.previous).toBeNull()
    history.push(make('b'))
    history.push(make('c'))
    expect(history.current?.artifactId).toBe('c')
    expect(history.previous?.artifactId).toBe('b')
  })
})

describe('SingleFlight', () => {
  it('aborts the pending request when a new one begins', () => {
    const flight = new SingleFlight()
    const first = flight.begin()
    expect(first.aborted).toBe(false)
    const second = flight.begin()
    expect(first.aborted).toBe(true)
    expect(second.aborted).toBe(false)
  })

  it('recognizes abort errors so they stay silent', async () => {
    const flight = new SingleFlight()
    const signal = flight.begin()
    const pending = fetch('http://127.0.0.1:1/never', { signal }).catch((error) => error)
    flight.begin()
    const error = await pending
    expect(isAbortError(error)).toBe(true)
    expect(isAbortError(new Error('boom'))).toBe(false)
  })
})
