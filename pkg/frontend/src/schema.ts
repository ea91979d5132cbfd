/** Shared wire schemas: the recording file format, the stimulus schedule,
 * and the service's response shapes.  Every outgoing recording is
 * validated against `recordingSchema` before it is POSTed.
 */

import { z } from "zod";

export const gazeSampleSchema = z.object({
  t: z.number().finite().nonnegative(),
  x_deg: z.number().finite(),
  y_deg: z.number().finite(),
  valid: z.boolean(),
});

export const recordingSchema = z
  .object({
    rate_hz: z.number().finite().positive(),
    samples: z.array(gazeSampleSchema).min(2),
    meta: z.record(z.string(), z.string()),
  })
  .refine(
    (rec) => rec.samples.every((s, i) => i === 0 || s.t > rec.samples[i - 1]!.t),
    { message: "sample timestamps must be strictly increasing" },
  );

export type Recording = z.infer<typeof recordingSchema>;
export type GazeSample = z.infer<typeof gazeSampleSchema>;

export const stimulusTargetSchema = z.object({
  x_deg: z.number().finite(),
  y_deg: z.number().finite(),
  onset_s: z.number().finite().nonnegative(),
  duration_s: z.number().finite().positive(),
});

export const scheduleSchema = z.object({
  seed: z.number().int(),
  period_s: z.number().finite().positive(),
  total_s: z.number().finite().positive(),
  targets: z.array(stimulusTargetSchema).min(1),
});

export type StimulusSchedule = z.infer<typeof scheduleSchema>;
export type StimulusTarget = z.infer<typeof stimulusTargetSchema>;

export const verifyResponseSchema = z.object({
  name: z.string(),
  similarity: z.number(),
  decision: z.enum(["accept", "reject"]),
  threshold: z.number(),
  embed_ms: z.number(),
  total_ms: z.number(),
});

export type VerifyResponse = z.infer<typeof verifyResponseSchema>;

export const enrollResponseSchema = z.object({
  name: z.string(),
  embedding_count: z.number().int().positive(),
});

export type EnrollResponse = z.infer<typeof enrollResponseSchema>;

export const healthSchema = z.object({
  status: z.string(),
  model_id: z.string(),
  model_rate_hz: z.number(),
  threshold: z.number(),
  uptime_s: z.number(),
});

export type Health = z.infer<typeof healthSchema>;
