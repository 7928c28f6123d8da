#!/usr/bin/env python3

'''

   Copyright 2026 The relitcamo Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.

'''

## @file
#
#  A small seeded detector standing in for a trained one.  It has no learned weights: three
#  banks of 3×3 filters are drawn from a counter-based generator keyed by the seed, so the same
#  seed always gives the same detector.
#
#  The image goes through the three banks (replicate padding, tanh after each).  The first
#  bank is zero-mean, so every flat image produces one and the same response, f_flat.  How far
#  the response strays from it is the "structure energy" of a pixel,
#
#      e = Σ_c (f_c − f_flat,c)²
#
#  and an anchor box scores
#
#      confidence = sigmoid(gain·mean_box(e) + (mean_box(luminance) − 0.5) + bias)
#
#  Edges and texture make an object stand out, flat regions that match their surroundings make
#  it disappear.  The gain is calibrated per seed so a reference rectangle of contrast 0.5
#  scores a logit of +3.
#
#  Everything is differentiable, and the backward pass below is written out by hand.

import numpy as np

from relitcamo import exceptions
from relitcamo import log

_log = log.GetLogger(__name__)

CHANNELS = 8
BIAS = -4.0
LUMINANCE_WEIGHT = 1.0
REFERENCE_LOGIT = 3.0

## Detections at or below this confidence are dropped.
THRESHOLD = 0.05


## The IoU of two boxes (xmin, ymin, xmax, ymax).
def Iou(a, b):
    for box in (a, b):
        if not (box[0] < box[2] and box[1] < box[3]):
            raise exceptions.rcDetectorError("degenerate box " + repr(tuple(box) ), "box")
    iw = min(a[2], b[2]) - max(a[0], b[0])
    ih = min(a[3], b[3]) - max(a[1], b[1])
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return float(inter / union)


## @class Detection
class Detection(object):
    box = None
    confidence = None
    class_id = None
    ## The anchor the detection came from.
    anchor_index = None

    def __init__(self, box, confidence, class_id=0, anchor_index=-1):
        self.box = tuple(float(a) for a in box)
        self.confidence = float(confidence)
        self.class_id = int(class_id)
        self.anchor_index = int(anchor_index)

    def __repr__(self):
        return "Detection(box=%r, confidence=%r, class_id=%r, anchor_index=%r)" % (self.box, self.confidence, self.class_id, self.anchor_index)


def _conv(x, W, b):
    C, H, Wd = x.shape
    xp = np.pad(x, ( (0, 0), (1, 1), (1, 1) ), mode='edge')
    out = np.empty( (W.shape[0], H, Wd) )
    out[...] = b[:, None, None]
    for dy in range(3):
        for dx in range(3):
            out += np.einsum('oi,ihw->ohw', W[:, :, dy, dx], xp[:, dy:dy + H, dx:dx + Wd])
    return out

def _convBackward(gout, W):
    O, H, Wd = gout.shape
    gxp = np.zeros( (W.shape[1], H + 2, Wd + 2) )
    for dy in range(3):
        for dx in range(3):
            gxp[:, dy:dy + H, dx:dx + Wd] += np.einsum('oi,ohw->ihw', W[:, :, dy, dx], gout)
    # Padding replicated the border, so its gradient folds back onto the border.
    gxp[:, 1, :] += gxp[:, 0, :]
    gxp[:, H, :] += gxp[:, H + 1, :]
    gxp[:, :, 1] += gxp[:, :, 0]
    gxp[:, :, Wd] += gxp[:, :, Wd + 1]
    return gxp[:, 1:H + 1, 1:Wd + 1]

def _sat(a):
    s = np.zeros( (a.shape[0] + 1, a.shape[1] + 1) )
    s[1:, 1:] = a.cumsum(axis=0).cumsum(axis=1)
    return s


## @class DetectorPass
#
#  The forward pass of one image, with whatever the backward pass needs.
class DetectorPass(object):
    image = None
    ## Layer activations, C×H×W, input first.
    activations = None
    energy = None
    luminance = None
    ## Per anchor.
    boxes = None
    pooled_energy = None
    pooled_luminance = None
    logits = None
    confidences = None

    def __init__(self, **args):
        for key, value in args.items():
            setattr(self, key, value)


## @class SurrogateDetector
#
#  Immutable after construction; every method is safe to call from several threads.
class SurrogateDetector(object):
    __seed = None
    __strides = None
    __scales = None
    __threshold = None
    __class_id = None
    __weights = None
    __biases = None
    __flat = None
    __gain = None
    ## Anchor boxes already laid out, by image size.
    __anchors = None

    ## Keyword arguments: seed (0), strides ([8]), scales ([16, 24, 32]), threshold (0.05) and
    #  class_id (0), the class every detection is reported as.
    def __init__(self, **args):
        self.__seed = int(args.get('seed', 0) )
        self.__strides = [ int(a) for a in args.get('strides', [8]) ]
        self.__scales = [ int(a) for a in args.get('scales', [16, 24, 32]) ]
        self.__threshold = float(args.get('threshold', THRESHOLD) )
        self.__class_id = int(args.get('class_id', 0) )
        self.__anchors = {}

        if self.__seed < 0 or self.__seed >= 2 ** 64:
            raise exceptions.rcConfigError("detector.seed: must be a 64-bit unsigned integer, got " + str(self.__seed) )
        if len(self.__strides) == 0 or min(self.__strides) < 1:
            raise exceptions.rcConfigError("detector.strides: need at least one positive stride")
        if len(self.__scales) == 0 or min(self.__scales) < 1:
            raise exceptions.rcConfigError("detector.scales: need at least one positive scale")
        if not 0.0 <= self.__threshold < 1.0:
            raise exceptions.rcConfigError("detector.threshold: must be in [0, 1), got " + repr(self.__threshold) )

        rng = np.random.Generator(np.random.Philox(key=self.__seed) )
        self.__weights = []
        self.__biases = []
        fan = 3
        for layer in range(3):
            W = rng.normal(0.0, np.sqrt(2.0 / (9 * fan) ), size=(CHANNELS, fan, 3, 3) )
            if layer == 0:
                W -= W.mean(axis=(1, 2, 3), keepdims=True)
            self.__weights.append(W)
            self.__biases.append(rng.normal(0.0, 0.1, size=CHANNELS) )
            fan = CHANNELS

        f = np.zeros(3)
        for W, b in zip(self.__weights, self.__biases):
            f = np.tanh(W.sum(axis=(2, 3) ) @ f + b)
        self.__flat = f

        self.__gain = 1.0
        self.__gain = self.__calibrate()
        _log.debug("detector seed %d: gain %.6g", self.__seed, self.__gain)

    def __calibrate(self):
        ref = np.full( (32, 32, 3), 0.5)
        ref[8:24, 8:24] = 0.0
        p = self.__features(ref)
        E = p.energy[8:24, 8:24].mean()
        L = p.luminance[8:24, 8:24].mean()
        if not E > 1e-12:
            raise exceptions.rcDetectorError("detector seed " + str(self.__seed) + " produces no structure response", "detector.seed")
        return (REFERENCE_LOGIT - BIAS - LUMINANCE_WEIGHT * (L - 0.5) ) / E

    def Seed(self):
        return self.__seed

    def Strides(self):
        return list(self.__strides)

    def Scales(self):
        return list(self.__scales)

    def Threshold(self):
        return self.__threshold

    def Gain(self):
        return self.__gain

    def ClassId(self):
        return self.__class_id

    ## Weights and biases, as a list of (W, b) per layer.  Copies.
    def Weights(self):
        return [ (W.copy(), b.copy() ) for W, b in zip(self.__weights, self.__biases) ]

    ## The detector's description as written in run configs.  Weights are never written, the
    #  seed regenerates them.
    def Spec(self):
        return {
            'seed' : self.__seed,
            'strides' : list(self.__strides),
            'scales' : list(self.__scales),
            'threshold' : self.__threshold,
        }

    ## All anchor boxes for an image size, as an A×4 integer array.  Anchors are ordered by
    #  stride, then row, then column, then scale.
    def Anchors(self, height, width):
        key = (int(height), int(width) )
        if key in self.__anchors:
            return self.__anchors[key]
        for s in self.__strides:
            if height % s != 0 or width % s != 0:
                raise exceptions.rcDetectorError("image size " + str(width) + "x" + str(height) + " is not divisible by the anchor stride " + str(s), "image")

        boxes = []
        for s in self.__strides:
            for i in range(height // s):
                for j in range(width // s):
                    cx = s * j + s // 2
                    cy = s * i + s // 2
                    for k in self.__scales:
                        boxes.append( (max(0, cx - k // 2), max(0, cy - k // 2),
                                       min(width, cx + k - k // 2), min(height, cy + k - k // 2) ) )
        anchors = np.array(boxes, dtype=np.int64)
        anchors.setflags(write=False)
        self.__anchors[key] = anchors
        return anchors

    def __features(self, image):
        x = np.transpose(image, (2, 0, 1) )
        acts = [x]
        for W, b in zip(self.__weights, self.__biases):
            x = np.tanh(_conv(x, W, b) )
            acts.append(x)
        diff = x - self.__flat[:, None, None]
        return DetectorPass(image=image, activations=acts,
                            energy=(diff * diff).sum(axis=0),
                            luminance=image.mean(axis=2) )

    def __check(self, image):
        image = np.asarray(image, dtype=np.float64)
        if image.ndim != 3 or image.shape[2] != 3:
            raise exceptions.rcDetectorError("image must be H×W×3, got shape " + str(image.shape), "image")
        if not np.all(np.isfinite(image) ):
            raise exceptions.rcNumericError("image has non-finite pixels")
        if image.min() < 0.0 or image.max() > 1.0:
            raise exceptions.rcDetectorError("image values must be in [0,1]", "image")
        return image

    ## Runs the detector on an H×W×3 image and scores every anchor.
    def Forward(self, image):
        image = self.__check(image)
        anchors = self.Anchors(image.shape[0], image.shape[1])
        p = self.__features(image)

        x0, y0, x1, y1 = anchors[:, 0], anchors[:, 1], anchors[:, 2], anchors[:, 3]
        area = ( (x1 - x0) * (y1 - y0) ).astype(np.float64)
        se = _sat(p.energy)
        sl = _sat(p.luminance)
        p.boxes = anchors
        p.pooled_energy = (se[y1, x1] - se[y0, x1] - se[y1, x0] + se[y0, x0]) / area
        p.pooled_luminance = (sl[y1, x1] - sl[y0, x1] - sl[y1, x0] + sl[y0, x0]) / area
        p.logits = self.__gain * p.pooled_energy + LUMINANCE_WEIGHT * (p.pooled_luminance - 0.5) + BIAS
        p.confidences = 1.0 / (1.0 + np.exp(-p.logits) )
        return p

    ## Gradient of one anchor's confidence with respect to the image pixels.
    def ConfidenceGradient(self, p, anchor):
        x0, y0, x1, y1 = (int(a) for a in p.boxes[anchor])
        area = float( (x1 - x0) * (y1 - y0) )
        c = p.confidences[anchor]
        dlogit = c * (1.0 - c)

        H, W = p.energy.shape
        gE = np.zeros( (H, W) )
        gE[y0:y1, x0:x1] = dlogit * self.__gain / area

        acts = p.activations
        g = 2.0 * (acts[-1] - self.__flat[:, None, None]) * gE[None, :, :]
        for layer in range(2, -1, -1):
            g = g * (1.0 - acts[layer + 1] ** 2)
            g = _convBackward(g, self.__weights[layer])

        grad = np.transpose(g, (1, 2, 0) ).copy()
        grad[y0:y1, x0:x1, :] += dlogit * LUMINANCE_WEIGHT / (3.0 * area)
        return grad

## Runs the detector and returns the detections above its threshold, most confident first,
#  ties by anchor index.
def Detect(det, image):
    return DetectionsOf(det, det.Forward(image) )

def DetectionsOf(det, p):
    idx = np.flatnonzero(p.confidences > det.Threshold() )
    idx = idx[np.lexsort( (idx, -p.confidences[idx]) )]
    return [ Detection(p.boxes[a], p.confidences[a], det.ClassId(), a) for a in idx ]

## The detection loss of a frame: the confidence of the detection overlapping the ground truth
#  the most, ties by position in the list.
#
#  @return (loss, index into dets).  When nothing of the ground truth's class overlaps it, the
#          loss is 0 and the index is −1.
def DetectionLoss(dets, gt):
    gtBox = gt.Box()
    best = -1
    bestIou = 0.0
    for i, d in enumerate(dets):
        if d.class_id != gt.class_id:
            continue
        v = Iou(gtBox, d.box)
        if v > bestIou:
            best = i
            bestIou = v
    if best < 0:
        return 0.0, -1
    return dets[best].confidence, best

## Loss, selected index and the gradient of the loss with respect to the image.  The selection
#  counts as constant, so the sentinel case has a zero gradient.
def LossAndGradient(det, image, gt):
    p = det.Forward(image)
    dets = DetectionsOf(det, p)
    loss, index = DetectionLoss(dets, gt)
    if index < 0:
        return 0.0, -1, np.zeros(p.image.shape)
    return loss, index, det.ConfidenceGradient(p, dets[index].anchor_index)

def LossGradient(det, image, gt):
    return LossAndGradient(det, image, gt)[2]
