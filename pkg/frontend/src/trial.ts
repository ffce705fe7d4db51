/**
 * Trial flow state machine, kept free of real DOM types so the whole
 * loop runs under tests. The timer arms only once the trial image has
 * finished loading; the found-click submits image-space coordinates and
 * the client-measured duration, and the flow advances only on the
 * server acknowledgment. Double submissions collapse to a single record
 * (locally, and the server keeps the first on races). No trial state is
 * kept beyond the active trial; a refresh resumes from the server.
 */

import { ApiError, NetworkError, StudyApi, TrialAck } from "./api.js";
import { displayToImage } from "./coords.js";

/** The slice of HTMLImageElement the flow needs; fakes implement this. */
// eslint-disable-next-line @typescript-eslint/no-explicit-any
export type ImageEventHandler = ((ev: any) => any) | null;

export interface TrialImage {
  src: string;
  onload: ImageEventHandler;
  onerror: ImageEventHandler;
  getBoundingClientRect(): { left: number; top: number; width: number; height: number };
}

export interface TrialView {
  pairId: string;
  targetName: string;
  imageWidth: number;
  imageHeight: number;
  startedToken: string;
  clientShownAt: number;
}

export type TrialState =
  | { kind: "idle" }
  | { kind: "loading" }
  | { kind: "active"; view: TrialView }
  | { kind: "submitting"; view: TrialView }
  | { kind: "done" }
  | { kind: "retry"; message: string };

export interface SubmitOutcome {
  ack: TrialAck;
  clientDurationMs: number;
}

export class TrialRunner {
  state: TrialState = { kind: "idle" };
  private inFlight: Promise<SubmitOutcome> | null = null;

  constructor(
    private api: StudyApi,
    private sessionId: string,
    private image: TrialImage,
    private now: () => number = () => Date.now()
  ) {}

  /**
   * Fetch and render the next trial. Resolves to the active view once
   * the image load event has fired (that is when the clock starts), to
   * "done" when the session is exhausted, or to "retry" on network
   * failure; a failed fetch consumes nothing server-side.
   */
  async next(): Promise<TrialState> {
    this.state = { kind: "loading" };
    this.inFlight = null;
    let payload;
    try {
      payload = await this.api.nextTrial(this.sessionId);
    } catch (err) {
      if (err instanceof NetworkError) {
        this.state = { kind: "retry", message: "cannot reach the study server" };
        return this.state;
      }
      throw err;
    }
    if (payload.done) {
      this.state = { kind: "done" };
      return this.state;
    }
    const loaded = new Promise<void>((resolve, reject) => {
      this.image.onload = () => resolve();
      this.image.onerror = () => reject(new NetworkError("trial image failed to load"));
    });
    this.image.src = this.api.resolve(payload.image_url!);
    try {
      await loaded;
    } catch {
      this.state = { kind: "retry", message: "trial image failed to load" };
      return this.state;
    }
    this.state = {
      kind: "active",
      view: {
        pairId: payload.pair_id!,
        targetName: payload.target_name!,
        imageWidth: payload.image_width!,
        imageHeight: payload.image_height!,
        startedToken: payload.started_token!,
        clientShownAt: this.now(), // after load completion, not request time
      },
    };
    return this.state;
  }

  /**
   * Submit the found-confirmation for a click at display coordinates
   * relative to the viewport. Idempotent: concurrent or repeated calls
   * reuse the first in-flight submission.
   */
  submitFound(clientX: number, clientY: number): Promise<SubmitOutcome> {
    if (this.inFlight) {
      return this.inFlight;
    }
    if (this.state.kind !== "active") {
      return Promise.reject(new Error(`no active trial (state: ${this.state.kind})`));
    }
    const view = this.state.view;
    this.state = { kind: "submitting", view: view };
    const rect = this.image.getBoundingClientRect();
    const click = displayToImage(clientX - rect.left, clientY - rect.top, rect, {
      width: view.imageWidth,
      height: view.imageHeight,
    });
    const clientDurationMs = this.now() - view.clientShownAt;
    this.inFlight = this.api
      .submitTrial(this.sessionId, view.pairId, view.startedToken, click, clientDurationMs)
      .then((ack) => {
        this.state = { kind: "idle" };
        return { ack: ack, clientDurationMs: clientDurationMs };
      })
      .catch((err) => {
        this.inFlight = null;
        if (err instanceof ApiError) {
          // rejected token or similar: surface it, keep the trial visible
          this.state = { kind: "active", view: view };
        } else {
          this.state = { kind: "retry", message: String(err) };
        }
        throw err;
      });
    return this.inFlight;
  }
}
