// Piano-roll rendering: time across, pitch up, one rectangle per note,
// velocity as opacity, bar lines from the service-reported bar length.

import type { Pianoroll } from './api.js'

const ROLL_HEIGHT = 180
const PITCH_PAD = 2

export function drawPianoroll(canvas: HTMLCanvasElement, roll: Pianoroll): void {
  const context = canvas.getContext('2d')
  if (!context) {
    return
  }
  const width = canvas.clientWidth || 480
  canvas.width = width
  canvas.height = ROLL_HEIGHT

  context.fillStyle = '#fbfaf7'
  context.fillRect(0, 0, width, ROLL_HEIGHT)

  const totalTicks = Math.max(roll.n_bars, 1) * roll.bar_ticks
  const ticksToX = (ticks: number) => (ticks / totalTicks) * width

  context.strokeStyle = '#e3ded2'
  context.lineWidth = 1
  for (let bar = 0; bar <= roll.n_bars; bar += 1) {
    const x = ticksToX(bar * roll.bar_ticks)
    context.beginPath()
    context.moveTo(x, 0)
    context.lineTo(x, ROLL_HEIGHT)
    context.stroke()
  }

  if (roll.notes.length === 0) {
    context.fillStyle = '#8d8778'
    context.font = '12px sans-serif'
    context.textAlign = 'center'
    context.fillText('(no notes)', width / 2, ROLL_HEIGHT / 2)
    return
  }

  const pitches = roll.notes.map((note) => note.pitch)
  const low = Math.min(...pitches) - PITCH_PAD
  const high = Math.max(...pitches) + PITCH_PAD
  const rowHeight = ROLL_HEIGHT / (high - low + 1)

  for (const note of roll.notes) {
    const x = ticksToX(note.onset)
    const noteWidth = Math.max(ticksToX(note.duration), 2)
    const y = ROLL_HEIGHT - (note.pitch - low + 1) * rowHeight
    context.fillStyle = `rgba(84, 112, 184, ${0.35 + 0.65 * (note.velocity / 127)})`
    context.fillRect(x, y, noteWidth, Math.max(rowHeight - 1, 2))
  }
}
