// Valence-arousal quadrant math and the scatter plot of scene moods.
// Quadrants are numbered counter-clockwise from upper-right: Q1 (+V, +A),
// Q2 (-V, +A), Q3 (-V, -A), Q4 (+V, -A); the axes belong to the
// non-negative side, matching the service.

import type { SceneRecord } from './api.js'

export type PlotGeometry = {
  width: number
  height: number
  margin: number
}

export const DEFAULT_GEOMETRY: PlotGeometry = { width: 360, height: 360, margin: 28 }

const QUADRANT_COLORS: Record<number, string> = {
  1: '#e8a33d',
  2: '#c84f4f',
  3: '#5470b8',
  4: '#4fa46b'
}

export function quadrantOf(v: number, a: number): 1 | 2 | 3 | 4 {
  if (v >= 0) {
    return a >= 0 ? 1 : 4
  }
  return a >= 0 ? 2 : 3
}

export function vaToPixel(
  v: number,
  a: number,
  geometry: PlotGeometry = DEFAULT_GEOMETRY
): { x: number; y: number } {
  const innerWidth = geometry.width - 2 * geometry.margin
  const innerHeight = geometry.height - 2 * geometry.margin
  return {
    x: geometry.margin + ((v + 1) / 2) * innerWidth,
    y: geometry.margin + (1 - (a + 1) / 2) * innerHeight
  }
}

export function pixelToVa(
  x: number,
  y: number,
  geometry: PlotGeometry = DEFAULT_GEOMETRY
): { v: number; a: number } | null {
  const innerWidth = geometry.width - 2 * geometry.margin
  const innerHeight = geometry.height - 2 * geometry.margin
  const v = ((x - geometry.margin) / innerWidth) * 2 - 1
  const a = (1 - (y - geometry.margin) / innerHeight) * 2 - 1
  if (v < -1 || v > 1 || a < -1 || a > 1) {
    return null
  }
  return { v, a }
}

export function sceneAtPixel(
  scenes: SceneRecord[],
  x: number,
  y: number,
  geometry: PlotGeometry = DEFAULT_GEOMETRY,
  radius = 10
): SceneRecord | null {
  let best: SceneRecord | null = null
  let bestDistance = radius
  for (const scene of scenes) {
    const point = vaToPixel(scene.V, scene.A, geometry)
    const distance = Math.hypot(point.x - x, point.y - y)
    if (distance <= bestDistance) {
      best = scene
      bestDistance = distance
    }
  }
  return best
}

export function drawQuadrantPlot(
  canvas: HTMLCanvasElement,
  scenes: SceneRecord[],
  selectedIndex: number | null,
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
  context.lineWidth = 1
  context.strokeRect(margin, margin, width - 2 * margin, height - 2 * margin)
  context.beginPath()
  context.moveTo(center.x, margin)
  context.lineTo(center.x, height - margin)
  context.moveTo(margin, center.y)
  context.lineTo(width - margin, center.y)
  context.stroke()

  context.fillStyle = '#8d8778'
  context.font = '12px sans-serif'
  context.textAlign = 'center'
  const inset = 16
  context.fillText('Q1', width - margin - inset, margin + inset + 4)
  context.fillText('Q2', margin + inset, margin + inset + 4)
  context.fillText('Q3', margin + inset, height - margin - inset)
  context.fillText('Q4', width - margin - inset, height - margin - inset)
  context.fillText('valence →', center.x, height - 8)
  context.save()
  context.translate(12, center.y)
  context.rotate(-Math.PI / 2)
  context.fillText('arousal →', 0, 0)
  context.restore()

  for (const scene of scenes) {
    const point = vaToPixel(scene.V, scene.A, geometry)
    context.beginPath()
    context.arc(point.x, point.y, scene.index === selectedIndex ? 7 : 5, 0, 2 * Math.PI)
    context.fillStyle = QUADRANT_COLORS[scene.quadrant] ?? '#555'
    context.fill()
    if (scene.index === selectedIndex) {
      context.strokeStyle = '#2b2a26'
      context.lineWidth = 2
      context.stroke()
    }
    context.fillStyle = '#2b2a26'
    context.font = '10px sans-serif'
    context.fillText(String(scene.index), point.x, point.y - 9)
  }
}
