// Typed client for the scenescore HTTP service.  Every number shown in the
// UI comes back through these calls; the client never derives V/A or notes
// on its own.

export type SceneRecord = {
  index: number
  heading: string
  V: number
  A: number
  quadrant: number
  coverage: number
  trajectory: number[][]
  warning: boolean
}

export type ScriptAnalysis = {
  script_id: string
  scenes: SceneRecord[]
}

export type GenerateResponse = {
  artifact_id: string
  model_hash: string
}

export type PianorollNote = {
  onset: number
  pitch: number
  velocity: number
  duration: number
}

export type Pianoroll = {
  ppq: number
  tempo_bpm: number
  bar_ticks: number
  n_bars: number
  notes: PianorollNote[]
}

export type Health = {
  status: string
  model_loaded: boolean
  lexicon_loaded: boolean
}

export class ApiError extends Error {
  status: number

  constructor(status: number, message: string) {
    super(message)
    this.status = status
  }
}

async function errorFrom(response: Response): Promise<ApiError> {
  let detail = `${response.status} ${response.statusText}`
  try {
    const body = await response.json()
    if (typeof body.detail === 'string') {
      detail = body.detail
    } else if (body.detail !== undefined) {
      detail = JSON.stringify(body.detail)
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  return new ApiError(response.status, detail)
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw await errorFrom(response)
  }
  return (await response.json()) as T
}

export class ApiClient {
  baseUrl: string

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, '')
  }

  async health(): Promise<Health> {
    return asJson(await fetch(`${this.baseUrl}/health`))
  }

  async analyzeScript(text: string, signal?: AbortSignal): Promise<ScriptAnalysis> {
    return asJson(
      await fetch(`${this.baseUrl}/scripts`, {
        method: 'POST',
        headers: { 'Content-Type': 'text/plain; charset=utf-8' },
        body: text,
        signal
      })
    )
  }

  async getScenes(scriptId: string): Promise<ScriptAnalysis> {
    return asJson(await fetch(`${this.baseUrl}/scripts/${scriptId}/scenes`))
  }

  async uploadInspiration(data: ArrayBuffer | Blob): Promise<string> {
    const body = await asJson<{ inspiration_id: string }>(
      await fetch(`${this.baseUrl}/inspirations`, {
        method: 'POST',
        headers: { 'Content-Type': 'audio/midi' },
        body: data
      })
    )
    return body.inspiration_id
  }

  async generate(
    body: Record<string, unknown>,
    signal?: AbortSignal
  ): Promise<GenerateResponse> {
    return asJson(
      await fetch(`${this.baseUrl}/generate`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
        signal
      })
    )
  }

  async pianoroll(artifactId: string): Promise<Pianoroll> {
    return asJson(await fetch(`${this.baseUrl}/artifacts/${artifactId}/pianoroll`))
  }

  midiUrl(artifactId: string): string {
    return `${this.baseUrl}/artifacts/${artifactId}.mid`
  }
}
