/**
 * Display-space <-> image-space coordinate mapping. The image may be
 * rendered at any scale; clicks are captured in display pixels relative
 * to the element and submitted in natural image pixels.
 */

export interface DisplayRect {
  width: number;
  height: number;
}

export interface ImageSize {
  width: number;
  height: number;
}

export function displayToImage(
  displayX: number,
  displayY: number,
  rect: DisplayRect,
  image: ImageSize
): { x: number; y: number } {
  if (rect.width <= 0 || rect.height <= 0) {
    throw new Error("image element has no layout size");
  }
  const x = (displayX * image.width) / rect.width;
  const y = (displayY * image.height) / rect.height;
  // clamp: clicks on the last displayed pixel must stay inside the image
  return {
    x: Math.min(Math.max(x, 0), image.width - 1e-9),
    y: Math.min(Math.max(y, 0), image.height - 1e-9),
  };
}

export function imageToDisplay(
  imageX: number,
  imageY: number,
  rect: DisplayRect,
  image: ImageSize
): { x: number; y: number } {
  return {
    x: (imageX * rect.width) / image.width,
    y: (imageY * rect.height) / image.height,
  };
}
