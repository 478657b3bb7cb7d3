const { BlobServiceClient } = require('@azure/storage-blob');

const service = BlobServiceClient.fromConnectionString(process.env.STORAGE_CONN);

exports.handler = async (event) => {
  const container = service.getContainerClient(event.container);
  await container.getBlockBlobClient('drop.bin').upload(event.body, event.body.length);
  return { ok: true };
};
