// Per-scene mood trajectory: the lexicon-derived per-sentence V/A points
// come from the service; the editor only lets the artist drag the two
// endpoints that feed va_start / va_end of a trajectory request.

import { clampVA } from './state.js'
import { vaToPixel, type PlotGeometry, DEFAULT_GEOMETRY } from './quadrant.js'

export type TrajectoryEndpoints = {
  start: [number, number]
  end: [number, number]
}

// A scene needs at least two scored sentences to span a trajectory;
// anything shorter collapses to point mode.
export function collapsesToPoint(trajectory: number[][]): boolean {
  return trajectory.length < 2
}

export function endpointsFromScene(trajectory: number[][]): TrajectoryEndpoints | null {
  if (collapsesToPoint(trajectory)) {
    return null
  }
  const first = trajectory[0]
  const last = trajectory[trajectory.length - 1]
  return {
    start: [first[0], first[1]],
    end: [last[0], last[1]]
  }
}

export function withEndpoint(
  endpoints: TrajectoryEndpoints,
  which: 'start' | 'end',
  v: number,
  a: number
): TrajectoryEndpoints {
  const moved: [number, number] = [clampVA(v), clampVA(a)]
  return which === 'start'
    ? { start: moved, end: endpoints.end }
    : { start: endpoints.start, end: moved }
}

export function endpointAtPixel(
  endpoints: TrajectoryEndpoints,
  x: number,
  y: number,
  geometry: PlotGeometry = DEFAULT_GEOMETRY,
  radius = 12
): 'start' | 'end' | null {
  for (const which of ['end', 'start'] as const) {
    const [v, a] = endpoints[which]
    const point = vaToPixel(v, a, geometry)
    if (Math.hypot(point.x - x, point.y - y) <= radius) {
      return which
    }
  }
  return null
}

export function drawTrajectory(
  canvas: HTMLCanvasElement,
  trajectory: number[][],
  endpoints: TrajectoryEndpoints | null,
  geometry: PlotGeometry = DEFAULT_GEOMETRY
): void {
  const context = canvas.getContext('2d')
  if (!context) {
    return
  }
  canvas.width = geometry.width
  canvas.height = geometry.height
  const { margin, width, height } = geometry
  const center = vaToPixel(0, 0, geometry)

  context.clearRect(0, 0, width, height)
  context.fillStyle = '#fbfaf7'
  context.fillRect(margin, margin, width - 2 * margin, height - 2 * margin)
  context.strokeStyle = '#c9c4ba'
  context.strokeRect(margin, margin, width - 2 * margin, height - 2 * margin)
  context.beginPath()
  context.moveTo(center.x, margin)
  context.lineTo(center.x, height - margin)
  context.moveTo(margin, center.y)
  context.lineTo(width - margin, center.y)
  context.stroke()

  if (trajectory.length > 0) {
    context.beginPath()
    trajectory.forEach(([v, a], index) => {
      const point = vaToPixel(v, a, geometry)
      if (index === 0) {
        context.moveTo(point.x, point.y)
      } else {
        context.lineTo(point.x, point.y)
      }
    })
    context.strokeStyle = '#8d8778'
    context.lineWidth = 1.5
    context.stroke()
    for (const [v, a] of trajectory) {
      const point = vaToPixel(v, a, geometry)
      context.beginPath()
      context.arc(point.x, point.y, 3, 0, 2 * Math.PI)
      context.fillStyle = '#8d8778'
      context.fill()
    }
  }

  if (endpoints) {
    const handles: Array<['start' | 'end', string]> = [
      ['start', '#4fa46b'],
      ['end', '#c84f4f']
    ]
    for (const [which, color] of handles) {
      const [v, a] = endpoints[which]
      const point = vaToPixel(v, a, geometry)
      context.beginPath()
      context.arc(point.x, point.y, 7, 0, 2 * Math.PI)
      context.fillStyle = color
      context.fill()
      context.strokeStyle = '#2b2a26'
      context.lineWidth = 1.5
      context.stroke()
      context.fillStyle = '#2b2a26'
      context.font = '10px sans-serif'
      context.textAlign = 'center'
      context.fillText(which, point.x, point.y - 11)
    }
  }
}
