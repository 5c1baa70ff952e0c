/**
 * JSON contract with the survey service, declared independently of the
 * backend. Respondent-facing schemas are strict: an unexpected key is a
 * contract violation (policy internals must never leak to participants),
 * so parsing fails loudly instead of passing extras through.
 */

import { z } from "zod";

export const respondentViewSchema = z
  .object({
    session_id: z.string().min(1),
    status: z.enum(["active", "completed", "terminated"]),
    t: z.number().int().min(0),
    question: z.string().nullable(),
    completed: z.boolean(),
  })
  .strict();

export type RespondentView = z.infer<typeof respondentViewSchema>;

export const healthSchema = z
  .object({
    status: z.string(),
    sessions: z.number().int(),
    priors_loaded: z.boolean(),
  })
  .strict();

export type HealthView = z.infer<typeof healthSchema>;

const lsdeSchema = z
  .object({
    length: z.number(),
    disclosure: z.number(),
    emotion: z.number(),
    specificity: z.number(),
    composite: z.number(),
  })
  .strict();

const evUpdateSchema = z
  .object({
    state: z.string(),
    action: z.string(),
    before: z.number(),
    after: z.number(),
  })
  .strict();

export const debugExchangeSchema = z
  .object({
    t: z.number().int().min(1),
    question: z.string(),
    response: z.string(),
    lsde: lsdeSchema,
    specificity_flags: z
      .object({
        entities: z.number(),
        temporal: z.number(),
        spatial: z.number(),
      })
      .strict(),
    degraded: z.array(z.string()),
    state: z.string(),
    reward: z.number().nullable(),
    ev_update: evUpdateSchema.nullable(),
    action: z.string().nullable(),
    epsilon: z.number().nullable(),
    explored: z.boolean().nullable(),
    next_question: z.string().nullable(),
    generation_fallback: z.boolean(),
  })
  .strict();

export type DebugExchange = z.infer<typeof debugExchangeSchema>;

export const debugViewSchema = respondentViewSchema
  .extend({
    role: z.string(),
    topic: z.string(),
    horizon: z.number().int(),
    alpha: z.number(),
    seed: z.number().int().nullable(),
    state: z.string().nullable(),
    ev_row: z.record(z.string(), z.number()).nullable(),
    exchanges: z.array(debugExchangeSchema),
  })
  .strict();

export type DebugView = z.infer<typeof debugViewSchema>;

/** Keys that must never appear in a respondent-facing payload. */
export const POLICY_INTERNAL_KEYS = [
  "epsilon",
  "explored",
  "state",
  "ev_row",
  "ev_update",
  "reward",
  "lsde",
  "exchanges",
  "alpha",
  "seed",
] as const;

export interface SessionOptions {
  role: string;
  topic: string;
  horizon?: number;
  epsilon?: number;
  epsilon_schedule?: "fixed" | "linear_decay";
  epsilon_start?: number;
  epsilon_end?: number;
  seed?: number;
}
