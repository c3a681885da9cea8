// Client-side synthesis of a fetched piano roll.  The service stays
// symbolic-only; audio is a plain WebAudio triangle voice per note.

import type { Pianoroll } from './api.js'

export type ScheduledNote = {
  timeSec: number
  durationSec: number
  frequencyHz: number
  gain: number
}

export function ticksToSeconds(ticks: number, ppq: number, tempoBpm: number): number {
  return (ticks / ppq) * (60 / tempoBpm)
}

export function pitchToFrequency(pitch: number): number {
  return 440 * Math.pow(2, (pitch - 69) / 12)
}

export function buildSchedule(roll: Pianoroll): ScheduledNote[] {
  return roll.notes.map((note) => ({
    timeSec: ticksToSeconds(note.onset, roll.ppq, roll.tempo_bpm),
    durationSec: ticksToSeconds(note.duration, roll.ppq, roll.tempo_bpm),
    frequencyHz: pitchToFrequency(note.pitch),
    gain: note.velocity / 127
  }))
}

export function scheduleDuration(schedule: ScheduledNote[]): number {
  return schedule.reduce((end, note) => Math.max(end, note.timeSec + note.durationSec), 0)
}

export function playSchedule(context: AudioContext, schedule: ScheduledNote[]): number {
  const master = context.createGain()
  master.gain.value = 0.4
  master.connect(context.destination)
  const startAt = context.currentTime + 0.05

  for (const note of schedule) {
    const oscillator = context.createOscillator()
    oscillator.type = 'triangle'
    oscillator.frequency.value = note.frequencyHz

    const envelope = context.createGain()
    const begin = startAt + note.timeSec
    const end = begin + Math.max(note.durationSec, 0.05)
    envelope.gain.setValueAtTime(0, begin)
    envelope.gain.linearRampToValueAtTime(note.gain, begin + 0.01)
    envelope.gain.setValueAtTime(note.gain, Math.max(begin + 0.01, end - 0.04))
    envelope.gain.linearRampToValueAtTime(0, end)

    oscillator.connect(envelope)
    envelope.connect(master)
    oscillator.start(begin)
    oscillator.stop(end + 0.02)
  }
  return scheduleDuration(schedule) + 0.1
}
